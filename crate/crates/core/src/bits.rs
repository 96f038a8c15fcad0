//! Bit strings over GF(2) and dense Gaussian elimination.
//!
//! Position 0 is the leftmost bit of the textual form and the most
//! significant bit when a vector is read as a basis-state index, so the
//! string `"0111"` has bits `[0, 1, 1, 1]` and index `7`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{check_len, Error, Result};

const WORD: usize = 64;

/// Fixed-length bit string.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    // bit i lives in words[i / 64] at bit position i % 64; tail bits are zero
    words: Vec<u64>,
}

impl BitVec {
    /// All-zero vector of `len` bits.
    ///
    /// Panics if `len` is zero.
    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1, "bit vectors have at least one position");
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn ones(len: usize) -> Self {
        Self::zeros(len).complement()
    }

    /// Unit vector with a single 1 at `pos`.
    pub fn unit(len: usize, pos: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(pos, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Big-endian decode: bit 0 is the most significant bit of `value`.
    pub fn from_index(value: usize, len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len.min(usize::BITS as usize) {
            if (value >> i) & 1 == 1 {
                v.set(len - 1 - i, true);
            }
        }
        v
    }

    /// Big-endian encode, the inverse of [`BitVec::from_index`].
    ///
    /// Panics if the vector is longer than a machine word.
    pub fn to_index(&self) -> usize {
        assert!(self.len <= usize::BITS as usize);
        (0..self.len).fold(0, |acc, i| (acc << 1) | self.get(i) as usize)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, rng.gen());
        }
        v
    }

    /// Uniform sample from the odd-weight strings of length `len`.
    pub fn random_odd<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        // flipping the last bit of a uniform string toggles parity bijectively
        let mut v = Self::random(len, rng);
        if v.weight().is_multiple_of(2) {
            v.flip(len - 1);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.len, "bit {pos} out of range for length {}", self.len);
        (self.words[pos / WORD] >> (pos % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, pos: usize, bit: bool) {
        assert!(pos < self.len, "bit {pos} out of range for length {}", self.len);
        let mask = 1u64 << (pos % WORD);
        if bit {
            self.words[pos / WORD] |= mask;
        } else {
            self.words[pos / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, pos: usize) {
        assert!(pos < self.len, "bit {pos} out of range for length {}", self.len);
        self.words[pos / WORD] ^= 1u64 << (pos % WORD);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Membership in the odd-weight set.
    pub fn is_odd(&self) -> bool {
        self.weight() % 2 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_ones(&self) -> bool {
        self.weight() == self.len
    }

    pub fn complement(&self) -> Self {
        let mut out = Self {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_tail();
        out
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        check_len(self.len, other.len)?;
        Ok(self.zip_words(other, |a, b| a ^ b))
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        check_len(self.len, other.len)?;
        Ok(self.zip_words(other, |a, b| a & b))
    }

    /// In-place XOR; lengths must agree.
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// GF(2) inner product.
    pub fn dot(&self, other: &Self) -> Result<bool> {
        check_len(self.len, other.len)?;
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones % 2 == 1)
    }

    /// Whether every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Lowest set position.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    fn zip_words(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        Self {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Parse("empty bit string".into()));
        }
        let mut v = Self::zeros(s.len());
        for (i, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => v.set(i, true),
                _ => return Err(Error::Parse(format!("invalid bit character {:?} in {s:?}", c as char))),
            }
        }
        Ok(v)
    }
}

/// Linear system over GF(2): `rows · x = rhs`, homogeneous when `rhs` is absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2System {
    cols: usize,
    rows: Vec<BitVec>,
    rhs: Option<Vec<bool>>,
}

/// Outcome of [`Gf2System::solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gf2Solution {
    Consistent {
        particular: BitVec,
        nullspace: Vec<BitVec>,
    },
    Inconsistent,
}

impl Gf2System {
    pub fn homogeneous(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        for r in &rows {
            check_len(cols, r.len())?;
        }
        Ok(Self { cols, rows, rhs: None })
    }

    pub fn with_rhs(cols: usize, rows: Vec<BitVec>, rhs: Vec<bool>) -> Result<Self> {
        check_len(rows.len(), rhs.len())?;
        let mut sys = Self::homogeneous(cols, rows)?;
        sys.rhs = Some(rhs);
        Ok(sys)
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    /// Appends a homogeneous equation.
    pub fn push(&mut self, row: BitVec) -> Result<()> {
        check_len(self.cols, row.len())?;
        if let Some(rhs) = &mut self.rhs {
            rhs.push(false);
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.eliminate().pivots.len()
    }

    /// Basis of `{x : rows · x = 0}`, one vector per free column in
    /// increasing column order. The right-hand side, if any, is ignored.
    pub fn nullspace(&self) -> Vec<BitVec> {
        self.eliminate().nullspace(self.cols)
    }

    pub fn solve(&self) -> Gf2Solution {
        let ech = self.eliminate();
        if ech.rhs.iter().skip(ech.pivots.len()).any(|&b| b) {
            return Gf2Solution::Inconsistent;
        }
        let mut particular = BitVec::zeros(self.cols);
        for (r, &p) in ech.pivots.iter().enumerate() {
            particular.set(p, ech.rhs[r]);
        }
        Gf2Solution::Consistent {
            particular,
            nullspace: ech.nullspace(self.cols),
        }
    }

    fn eliminate(&self) -> Echelon {
        let mut rows = self.rows.clone();
        let mut rhs = self.rhs.clone().unwrap_or_else(|| vec![false; rows.len()]);
        let mut pivots = Vec::new();
        for col in 0..self.cols {
            let r = pivots.len();
            let Some(found) = (r..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(r, found);
            rhs.swap(r, found);
            let (head, tail) = rows.split_at_mut(r);
            let (pivot_row, rest) = tail.split_first_mut().unwrap();
            for (i, row) in head.iter_mut().chain(rest.iter_mut()).enumerate() {
                if row.get(col) {
                    row.xor_assign(pivot_row);
                    let idx = if i < r { i } else { i + 1 };
                    rhs[idx] ^= rhs[r];
                }
            }
            pivots.push(col);
            if pivots.len() == rows.len() {
                break;
            }
        }
        Echelon { rows, rhs, pivots }
    }
}

// reduced row-echelon form; rows[..pivots.len()] are the pivot rows
struct Echelon {
    rows: Vec<BitVec>,
    rhs: Vec<bool>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn nullspace(&self, cols: usize) -> Vec<BitVec> {
        let mut is_pivot = vec![false; cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut x = BitVec::unit(cols, free);
                for (r, &p) in self.pivots.iter().enumerate() {
                    if self.rows[r].get(free) {
                        x.set(p, true);
                    }
                }
                x
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    #[test]
    fn weight_examples() {
        assert_eq!(bv("0000").weight(), 0);
        assert_eq!(bv("0111").weight(), 3);
        assert!(bv("0111").is_odd());
        assert_eq!(bv("1111").weight(), 4);
        assert!(!bv("1111").is_odd());
    }

    #[test]
    fn dot_examples() {
        assert!(!bv("1010").dot(&bv("1010")).unwrap());
        assert!(bv("1010").dot(&bv("1000")).unwrap());
        for i in 0..16 {
            assert!(!bv("0000").dot(&BitVec::from_index(i, 4)).unwrap());
        }
        assert!(matches!(bv("10").dot(&bv("100")), Err(Error::Dimension { .. })));
    }

    #[test]
    fn index_is_big_endian() {
        assert_eq!(bv("0111").to_index(), 7);
        assert_eq!(bv("1000").to_index(), 8);
        assert_eq!(BitVec::from_index(5, 4).to_string(), "0101");
    }

    #[test]
    fn long_vectors_cross_word_boundaries() {
        let mut v = BitVec::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.weight(), 3);
        let c = v.complement();
        assert_eq!(c.weight(), 127);
        assert_eq!(c.complement(), v);
        assert_eq!(v.first_one(), Some(0));
        assert_eq!(v.to_string().parse::<BitVec>().unwrap(), v);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("".parse::<BitVec>().is_err());
        assert!("01x1".parse::<BitVec>().is_err());
    }

    #[test]
    fn nullspace_without_constraints_is_full() {
        let sys = Gf2System::homogeneous(3, vec![]).unwrap();
        let basis = sys.nullspace();
        assert_eq!(basis.len(), 3);
        assert_eq!(sys.rank(), 0);
    }

    #[test]
    fn nullspace_of_two_rows() {
        // enumeration oracle: the only nonzero x with x·110 = x·011 = 0 is 111
        let rows = vec![bv("110"), bv("011")];
        let oracle: Vec<BitVec> = (1..8)
            .map(|i| BitVec::from_index(i, 3))
            .filter(|x| rows.iter().all(|r| !r.dot(x).unwrap()))
            .collect();
        assert_eq!(oracle, vec![bv("111")]);
        let sys = Gf2System::homogeneous(3, rows).unwrap();
        assert_eq!(sys.nullspace(), oracle);
    }

    #[test]
    fn complement_of_k_recovers_k() {
        // every k in Omega_4: the rows spanning k-perp pin k down uniquely
        for ki in 1..16usize {
            let k = BitVec::from_index(ki, 4);
            if !k.is_odd() {
                continue;
            }
            let rows: Vec<BitVec> = (0..16)
                .map(|y| BitVec::from_index(y, 4))
                .filter(|y| !y.dot(&k).unwrap())
                .collect();
            let basis = Gf2System::homogeneous(4, rows).unwrap().nullspace();
            assert_eq!(basis, vec![k]);
        }
    }

    #[test]
    fn solve_identity_and_contradiction() {
        let sys = Gf2System::with_rhs(2, vec![bv("10"), bv("01")], vec![true, false]).unwrap();
        assert_eq!(
            sys.solve(),
            Gf2Solution::Consistent {
                particular: bv("10"),
                nullspace: vec![]
            }
        );
        let bad = Gf2System::with_rhs(2, vec![bv("11"), bv("11")], vec![false, true]).unwrap();
        assert_eq!(bad.solve(), Gf2Solution::Inconsistent);
    }

    #[test]
    fn full_rank_solution_matches_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 40 {
            let m = rng.gen_range(1..=8);
            let rows: Vec<BitVec> = (0..m).map(|_| BitVec::random(m, &mut rng)).collect();
            let rhs: Vec<bool> = (0..m).map(|_| rng.gen()).collect();
            let sys = Gf2System::with_rhs(m, rows.clone(), rhs.clone()).unwrap();
            if sys.rank() != m {
                continue;
            }
            let brute: Vec<BitVec> = (0..1usize << m)
                .map(|i| BitVec::from_index(i, m))
                .filter(|x| rows.iter().zip(&rhs).all(|(r, &b)| r.dot(x).unwrap() == b))
                .collect();
            assert_eq!(brute.len(), 1);
            match sys.solve() {
                Gf2Solution::Consistent { particular, nullspace } => {
                    assert!(nullspace.is_empty());
                    assert_eq!(particular, brute[0]);
                }
                Gf2Solution::Inconsistent => panic!("full-rank system reported inconsistent"),
            }
            checked += 1;
        }
    }

    fn arb_system() -> impl Strategy<Value = (usize, Vec<BitVec>)> {
        (1usize..=10).prop_flat_map(|len| {
            let row = proptest::collection::vec(any::<bool>(), len).prop_map(|b| BitVec::from_bools(&b));
            (Just(len), proptest::collection::vec(row, 0..12))
        })
    }

    proptest! {
        #[test]
        fn nullspace_is_orthogonal_and_rank_nullity_holds((len, rows) in arb_system()) {
            let sys = Gf2System::homogeneous(len, rows.clone()).unwrap();
            let basis = sys.nullspace();
            for b in &basis {
                for r in &rows {
                    prop_assert!(!r.dot(b).unwrap());
                }
            }
            prop_assert_eq!(sys.rank() + basis.len(), len);
            // exhaustive count of solutions must equal 2^dim
            let count = (0..1usize << len)
                .map(|i| BitVec::from_index(i, len))
                .filter(|x| rows.iter().all(|r| !r.dot(x).unwrap()))
                .count();
            prop_assert_eq!(count, 1usize << basis.len());
        }

        #[test]
        fn dot_is_bilinear(a in proptest::collection::vec(any::<bool>(), 1..70), seed in any::<u64>()) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let u = BitVec::from_bools(&a);
            let w = BitVec::random(u.len(), &mut rng);
            let v = BitVec::random(u.len(), &mut rng);
            let lhs = u.xor(&w).unwrap().dot(&v).unwrap();
            prop_assert_eq!(lhs, u.dot(&v).unwrap() ^ w.dot(&v).unwrap());
        }

        #[test]
        fn complement_and_xor_laws(a in proptest::collection::vec(any::<bool>(), 1..140)) {
            let v = BitVec::from_bools(&a);
            prop_assert_eq!(v.complement().complement(), v.clone());
            prop_assert!(v.xor(&v).unwrap().is_zero());
            prop_assert_eq!(v.to_string().parse::<BitVec>().unwrap(), v);
        }
    }
}
