//! Boolean functions in XOR-of-monomials form.
//!
//! Each output bit is the XOR of `p` monomials. A monomial is encoded by its
//! selection mask `a`: the term is `Π_β (s_β a_β ⊕ a_β ⊕ 1)`, which is the
//! AND of the selected input bits and the constant 1 for the empty mask.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::bits::BitVec;
use crate::error::{check_len, Error, Result};

/// One AND-term, identified by the set of input positions it reads.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    mask: BitVec,
}

impl Monomial {
    pub fn new(mask: BitVec) -> Self {
        Self { mask }
    }

    pub fn mask(&self) -> &BitVec {
        &self.mask
    }

    pub fn eval(&self, s: &BitVec) -> Result<bool> {
        check_len(self.mask.len(), s.len())?;
        Ok(self.mask.is_subset_of(s))
    }
}

/// An `m`-input, `n`-output Boolean function with `p` monomials per output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanFunction {
    m: usize,
    n: usize,
    p: usize,
    outputs: Vec<Vec<Monomial>>,
}

impl BooleanFunction {
    pub fn new(m: usize, n: usize, p: usize, outputs: Vec<Vec<Monomial>>) -> Result<Self> {
        if m == 0 || n == 0 || p == 0 {
            return Err(Error::Parameter("m, n and p must all be at least 1".into()));
        }
        check_len(n, outputs.len())?;
        for terms in &outputs {
            check_len(p, terms.len())?;
            for t in terms {
                check_len(m, t.mask.len())?;
            }
        }
        Ok(Self { m, n, p, outputs })
    }

    /// Coin-tossed function: `n·p·m` fair flips drawn output-major, then
    /// term, then variable.
    pub fn sample<R: Rng + ?Sized>(m: usize, n: usize, p: usize, rng: &mut R) -> Result<Self> {
        if m == 0 || n == 0 || p == 0 {
            return Err(Error::Parameter("m, n and p must all be at least 1".into()));
        }
        let outputs = (0..n)
            .map(|_| {
                (0..p)
                    .map(|_| {
                        let mut mask = BitVec::zeros(m);
                        for beta in 0..m {
                            mask.set(beta, rng.gen::<bool>());
                        }
                        Monomial::new(mask)
                    })
                    .collect()
            })
            .collect();
        Ok(Self { m, n, p, outputs })
    }

    /// Number of coin flips [`BooleanFunction::sample`] consumes.
    pub fn coin_flips(m: usize, n: usize, p: usize) -> usize {
        m * n * p
    }

    pub fn inputs(&self) -> usize {
        self.m
    }

    pub fn outputs(&self) -> usize {
        self.n
    }

    pub fn terms_per_output(&self) -> usize {
        self.p
    }

    pub fn output_terms(&self, j: usize) -> &[Monomial] {
        &self.outputs[j]
    }

    pub fn eval(&self, s: &BitVec) -> Result<BitVec> {
        check_len(self.m, s.len())?;
        let mut out = BitVec::zeros(self.n);
        for (j, terms) in self.outputs.iter().enumerate() {
            let bit = terms.iter().fold(false, |acc, t| acc ^ t.mask.is_subset_of(s));
            out.set(j, bit);
        }
        Ok(out)
    }
}

impl fmt::Display for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.m, self.n, self.p)?;
        for terms in &self.outputs {
            let line: Vec<String> = terms.iter().map(|t| t.mask.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl BooleanFunction {
    /// Parses one function from the front of `lines`, consuming exactly
    /// `1 + n` non-empty lines.
    pub fn parse_lines<'a, I>(lines: &mut I) -> Result<Self>
    where
        I: Iterator<Item = &'a str>,
    {
        let mut next = || {
            lines
                .by_ref()
                .map(str::trim)
                .find(|l| !l.is_empty())
                .ok_or_else(|| Error::Parse("unexpected end of Boolean function".into()))
        };
        let header = parse_triple(next()?)?;
        let (m, n, p) = header;
        let mut outputs = Vec::with_capacity(n);
        for _ in 0..n {
            let terms = next()?
                .split_whitespace()
                .map(|t| t.parse().map(Monomial::new))
                .collect::<Result<Vec<_>>>()?;
            outputs.push(terms);
        }
        Self::new(m, n, p, outputs)
    }
}

impl FromStr for BooleanFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        let f = Self::parse_lines(&mut lines)?;
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::Parse("trailing content after Boolean function".into()));
        }
        Ok(f)
    }
}

pub(crate) fn parse_triple(line: &str) -> Result<(usize, usize, usize)> {
    let nums = line
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("bad header {line:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    match nums[..] {
        [a, b, c] => Ok((a, b, c)),
        _ => Err(Error::Parse(format!("expected three integers, got {line:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    fn mono(s: &str) -> Monomial {
        Monomial::new(bv(s))
    }

    /// Truth-table oracle: expands each monomial literally as
    /// `Π (s_β a_β + a_β + 1) mod 2` over every input.
    #[allow(clippy::needless_range_loop)]
    fn truth_table(f: &BooleanFunction) -> Vec<Vec<bool>> {
        let m = f.inputs();
        (0..1usize << m)
            .map(|x| {
                let s: Vec<u8> = (0..m).map(|b| ((x >> (m - 1 - b)) & 1) as u8).collect();
                (0..f.outputs())
                    .map(|j| {
                        let mut acc = 0u8;
                        for t in f.output_terms(j) {
                            let mut prod = 1u8;
                            for beta in 0..m {
                                let a = t.mask().get(beta) as u8;
                                prod *= (s[beta] * a + a + 1) % 2;
                            }
                            acc ^= prod;
                        }
                        acc == 1
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn monomial_examples() {
        for s in ["000", "101", "111"] {
            assert!(mono("000").eval(&bv(s)).unwrap());
        }
        assert!(mono("110").eval(&bv("110")).unwrap());
        assert!(!mono("110").eval(&bv("100")).unwrap());
        assert!(mono("110").eval(&bv("10")).is_err());
    }

    #[test]
    fn cancelling_constants() {
        let f = BooleanFunction::new(2, 2, 2, vec![vec![mono("00"), mono("00")]; 2]).unwrap();
        for x in 0..4 {
            assert!(f.eval(&BitVec::from_index(x, 2)).unwrap().is_zero());
        }
    }

    #[test]
    fn two_term_function_matches_truth_table() {
        let f = BooleanFunction::new(3, 1, 2, vec![vec![mono("110"), mono("001")]]).unwrap();
        assert!(!f.eval(&bv("111")).unwrap().get(0));
        assert!(f.eval(&bv("110")).unwrap().get(0));
        let table = truth_table(&f);
        for (x, row) in table.iter().enumerate() {
            assert_eq!(f.eval(&BitVec::from_index(x, 3)).unwrap().get(0), row[0]);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let a = BooleanFunction::sample(2, 2, 2, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = BooleanFunction::sample(2, 2, 2, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(BooleanFunction::coin_flips(2, 2, 2), 8);
        assert_eq!(BooleanFunction::coin_flips(8, 8, 4), 256);
    }

    #[test]
    fn sampling_consumes_flips_in_order() {
        // replaying the same stream as individual bools reproduces the masks
        let f = BooleanFunction::sample(3, 2, 2, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for j in 0..2 {
            for alpha in 0..2 {
                for beta in 0..3 {
                    assert_eq!(f.output_terms(j)[alpha].mask().get(beta), rng.gen::<bool>());
                }
            }
        }
    }

    #[test]
    fn coefficient_frequencies_are_fair() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let (m, n, p) = (4, 4, 2);
        let mut counts = vec![0usize; m * n * p];
        let samples = 10_000;
        for _ in 0..samples {
            let f = BooleanFunction::sample(m, n, p, &mut rng).unwrap();
            for j in 0..n {
                for a in 0..p {
                    for b in 0..m {
                        counts[(j * p + a) * m + b] += f.output_terms(j)[a].mask().get(b) as usize;
                    }
                }
            }
        }
        for c in counts {
            let freq = c as f64 / samples as f64;
            assert!((freq - 0.5).abs() <= 0.02, "frequency {freq}");
        }
    }

    #[test]
    fn rejects_degenerate_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(BooleanFunction::sample(0, 2, 2, &mut rng).is_err());
        assert!(BooleanFunction::new(2, 1, 2, vec![vec![mono("00")]]).is_err());
    }

    #[test]
    fn text_format() {
        let f = BooleanFunction::new(3, 2, 2, vec![vec![mono("110"), mono("001")], vec![mono("000"), mono("111")]]).unwrap();
        assert_eq!(f.to_string(), "3 2 2\n110 001\n000 111\n");
        assert_eq!(f.to_string().parse::<BooleanFunction>().unwrap(), f);
        assert!("3 2 2\n110 001\n".parse::<BooleanFunction>().is_err());
    }

    proptest! {
        #[test]
        fn eval_matches_truth_table(seed in any::<u64>(), m in 1usize..=8, n in 1usize..=4, p in 1usize..=4) {
            let f = BooleanFunction::sample(m, n, p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let table = truth_table(&f);
            for (x, row) in table.iter().enumerate() {
                let out = f.eval(&BitVec::from_index(x, m)).unwrap();
                prop_assert_eq!(out.iter().collect::<Vec<_>>(), row.clone());
            }
            prop_assert_eq!(f.to_string().parse::<BooleanFunction>().unwrap(), f);
        }

        #[test]
        fn duplicated_monomial_cancels(seed in any::<u64>(), m in 1usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = BooleanFunction::sample(m, 2, 2, &mut rng).unwrap();
            let extra = Monomial::new(BitVec::random(m, &mut rng));
            let mut outputs: Vec<Vec<Monomial>> = (0..2).map(|j| f.output_terms(j).to_vec()).collect();
            outputs[0].push(extra.clone());
            outputs[0].push(extra);
            let dup = outputs[1][0].clone();
            outputs[1].push(dup.clone());
            outputs[1].push(dup);
            let g = BooleanFunction::new(m, 2, 4, outputs).unwrap();
            for x in 0..1usize << m {
                let s = BitVec::from_index(x, m);
                prop_assert_eq!(f.eval(&s).unwrap(), g.eval(&s).unwrap());
            }
        }
    }
}
