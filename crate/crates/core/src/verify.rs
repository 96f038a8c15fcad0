//! Numerical checks of the security claims: the `Y^α H^β` twirl maps every
//! state to `I/2ⁿ`, public-key and ciphertext ensembles are maximally
//! mixed, and ciphertext ensembles are indistinguishable.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::bits::BitVec;
use crate::error::{check_len, Error, Result};
use crate::qsim::{check_capacity, DenseState, DensityMatrix, Pauli, TwoBranchState, DENSE_LIMIT};
use crate::scheme::KeyTriple;
use crate::trial_rng;

/// Qubit cap for the `4ⁿ`-term twirl.
pub const TWIRL_LIMIT: usize = 6;

/// Which `k1` values an ensemble ranges over; `k2` and `k3` are always
/// unrestricted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KeyDomain {
    /// Odd weight, as issued.
    Omega,
    Nonzero,
    /// Every string; `k1 = 0` contributes the dressed `|0ⁿ⟩`.
    All,
}

impl KeyDomain {
    pub fn contains(self, k1: &BitVec) -> bool {
        match self {
            KeyDomain::Omega => k1.is_odd(),
            KeyDomain::Nonzero => !k1.is_zero(),
            KeyDomain::All => true,
        }
    }
}

impl fmt::Display for KeyDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeyDomain::Omega => "odd",
            KeyDomain::Nonzero => "nonzero",
            KeyDomain::All => "all",
        })
    }
}

/// Every key in the domain, `k1` outermost, then `k2`, then `k3`.
pub fn ensemble_keys(n: usize, domain: KeyDomain) -> Vec<KeyTriple> {
    let mut keys = Vec::new();
    for x in 0..1usize << n {
        let k1 = BitVec::from_index(x, n);
        if !domain.contains(&k1) {
            continue;
        }
        for y in 0..1usize << n {
            for z in 0..1usize << n {
                keys.push(KeyTriple {
                    k1: k1.clone(),
                    k2: BitVec::from_index(y, n),
                    k3: BitVec::from_index(z, n),
                });
            }
        }
    }
    keys
}

/// Dense ciphertext of `bit` under `k`, for any `k1` including even weight
/// and zero.
pub fn ciphertext_dense(k: &KeyTriple, bit: bool) -> Result<DenseState> {
    let n = k.qubits();
    check_len(n, k.k2.len())?;
    check_len(n, k.k3.len())?;
    let y = if bit { k.k3.complement() } else { k.k3.clone() };
    if k.k1.is_zero() {
        return DenseState::zero(n)?
            .apply_hadamard_mask(&k.k2)?
            .apply_pauli_mask(Pauli::Y, &y);
    }
    TwoBranchState::plain(BitVec::zeros(n), k.k1.clone())?
        .with_masks(k.k2.clone(), y)?
        .expand()
}

/// Uniform mixture of ciphertext states over `keys`, reduced in parallel.
pub fn mixture_over(n: usize, bit: bool, keys: &[KeyTriple]) -> Result<DensityMatrix> {
    if keys.is_empty() {
        return Err(Error::Parameter("empty key ensemble".into()));
    }
    let w = 1.0 / keys.len() as f64;
    let zero = DensityMatrix::zeros(n)?;
    keys.par_iter()
        .try_fold(
            || zero.clone(),
            |mut acc, k| -> Result<DensityMatrix> {
                acc.add_pure(&ciphertext_dense(k, bit)?, w);
                Ok(acc)
            },
        )
        .try_reduce(
            || zero.clone(),
            |mut a, b| {
                a.add_scaled(&b, 1.0)?;
                Ok(a)
            },
        )
}

/// Sequential left-to-right version of [`mixture_over`].
pub fn mixture_over_sequential(n: usize, bit: bool, keys: &[KeyTriple]) -> Result<DensityMatrix> {
    if keys.is_empty() {
        return Err(Error::Parameter("empty key ensemble".into()));
    }
    let w = 1.0 / keys.len() as f64;
    let mut acc = DensityMatrix::zeros(n)?;
    for k in keys {
        acc.add_pure(&ciphertext_dense(k, bit)?, w);
    }
    Ok(acc)
}

pub fn ensemble_mixture(n: usize, bit: bool, domain: KeyDomain) -> Result<DensityMatrix> {
    check_capacity(n, DENSE_LIMIT)?;
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    mixture_over(n, bit, &ensemble_keys(n, domain))
}

/// `4^{−n} Σ_{α,β} Y^α H^β ρ H^β Y^α`.
pub fn perfect_encryption_transform(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let n = rho.qubits();
    check_capacity(n, TWIRL_LIMIT)?;
    let w = 1.0 / (1usize << (2 * n)) as f64;
    (0..1usize << (2 * n))
        .into_par_iter()
        .map(|ab| -> Result<DensityMatrix> {
            let alpha = BitVec::from_index(ab >> n, n);
            let beta = BitVec::from_index(ab & ((1 << n) - 1), n);
            let mut term = rho.conjugate_hadamard_mask(&beta)?.conjugate_pauli_mask(Pauli::Y, &alpha)?;
            term.scale(w);
            Ok(term)
        })
        .try_reduce_with(|mut a, b| {
            a.add_scaled(&b, 1.0)?;
            Ok(a)
        })
        .expect("at least one term")
}

/// Largest entrywise deviation from `I/2ⁿ` and whether it is within `tol`.
pub fn check_maximally_mixed(rho: &DensityMatrix, tol: f64) -> Result<(bool, f64)> {
    let dev = rho.max_abs_diff(&DensityMatrix::maximally_mixed(rho.qubits())?);
    Ok((dev <= tol, dev))
}

/// Distance between the bit-0 and bit-1 ciphertext ensembles.
pub fn proposition1_distance(n: usize) -> Result<f64> {
    let a = ensemble_mixture(n, false, KeyDomain::Omega)?;
    let b = ensemble_mixture(n, true, KeyDomain::Omega)?;
    a.trace_distance(&b)
}

/// Distance between two separately enumerated bit-`bit` ensembles: one
/// summed in parallel in natural order, the other sequentially in reverse.
pub fn proposition2_distance(n: usize, bit: bool) -> Result<f64> {
    check_capacity(n, DENSE_LIMIT)?;
    let keys = ensemble_keys(n, KeyDomain::Omega);
    let a = mixture_over(n, bit, &keys)?;
    let reversed: Vec<KeyTriple> = keys.into_iter().rev().collect();
    let b = mixture_over_sequential(n, bit, &reversed)?;
    a.trace_distance(&b)
}

/// `count` keys drawn uniformly with `k1 ∈ Ω_n`.
pub fn sample_keys<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<KeyTriple> {
    (0..count).map(|_| KeyTriple::random(n, rng)).collect()
}

/// Sampled counterpart of the first distance: bit 0 and bit 1 mixtures over
/// two independent key samples of size `count`.
pub fn sampled_proposition1_distance(n: usize, count: usize, seed: u64) -> Result<f64> {
    let mut rng = trial_rng(seed, 0);
    let a = mixture_over(n, false, &sample_keys(n, count, &mut rng))?;
    let b = mixture_over(n, true, &sample_keys(n, count, &mut rng))?;
    a.trace_distance(&b)
}

/// Sampled counterpart of the second distance: two disjoint key samples of
/// size `count`, same bit.
pub fn sampled_proposition2_distance(n: usize, bit: bool, count: usize, seed: u64) -> Result<f64> {
    let mut rng = trial_rng(seed, 0);
    let a = mixture_over(n, bit, &sample_keys(n, count, &mut rng))?;
    let b = mixture_over(n, bit, &sample_keys(n, count, &mut rng))?;
    a.trace_distance(&b)
}

/// Mean sampled distance at one sample size.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergencePoint {
    pub samples: usize,
    pub mean_distance: f64,
}

/// Mean of `reps` sampled distances at each size; repetition `r` at size
/// index `s` uses stream `s·reps + r` of `seed`.
pub fn convergence_study<F>(sizes: &[usize], reps: usize, seed: u64, distance: F) -> Result<Vec<ConvergencePoint>>
where
    F: Fn(usize, u64) -> Result<f64> + Sync,
{
    if reps == 0 {
        return Err(Error::Parameter("reps must be positive".into()));
    }
    sizes
        .iter()
        .enumerate()
        .map(|(s, &count)| {
            let total = (0..reps)
                .map(|r| {
                    let sub_seed = trial_rng(seed, (s * reps + r) as u64).gen::<u64>();
                    distance(count, sub_seed)
                })
                .sum::<Result<f64>>()?;
            Ok(ConvergencePoint { samples: count, mean_distance: total / reps as f64 })
        })
        .collect()
}

/// Dense matrix of `Y^α H^β`, row-major.
pub fn dressing_operator(alpha: &BitVec, beta: &BitVec) -> Result<Vec<Complex64>> {
    let n = alpha.len();
    check_len(n, beta.len())?;
    let dim = 1usize << n;
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let psi = DenseState::basis(&BitVec::from_index(col, n))?
            .apply_hadamard_mask(beta)?
            .apply_pauli_mask(Pauli::Y, alpha)?;
        for (row, a) in psi.amplitudes().iter().enumerate() {
            m[row * dim + col] = *a;
        }
    }
    Ok(m)
}

/// `tr(A B†)`.
pub fn hilbert_schmidt(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// One verified claim.
#[derive(Clone, Debug, PartialEq)]
pub struct ClaimReport {
    pub id: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl ClaimReport {
    /// Passes when `value <= tol`.
    pub fn at_most(id: impl Into<String>, value: f64, tol: f64) -> Self {
        Self { id: id.into(), value, tol, pass: value <= tol }
    }
}

impl fmt::Display for ClaimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "claim={} value={:.6e} tol={:.1e} result={}",
            self.id,
            self.value,
            self.tol,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Fixed-width table of claims followed by their machine-readable lines.
pub fn render_reports(reports: &[ClaimReport]) -> String {
    let width = reports.iter().map(|r| r.id.len()).max().unwrap_or(5).max(5);
    let mut out = format!("{:<width$}  {:>14}  {:>9}  {}\n", "claim", "value", "tol", "result");
    for r in reports {
        out.push_str(&format!(
            "{:<width$}  {:>14.6e}  {:>9.1e}  {}\n",
            r.id,
            r.value,
            r.tol,
            if r.pass { "PASS" } else { "FAIL" }
        ));
    }
    for r in reports {
        out.push_str(&format!("{r}\n"));
    }
    out
}

/// Random density matrix: a uniform convex mix of `terms` Gaussian pure
/// states (one term gives a pure state).
pub fn random_density_matrix<R: Rng + ?Sized>(n: usize, terms: usize, rng: &mut R) -> Result<DensityMatrix> {
    if terms == 0 {
        return Err(Error::Parameter("need at least one term".into()));
    }
    let raw: Vec<f64> = (0..terms).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let mut rho = DensityMatrix::zeros(n)?;
    for w in raw {
        rho.add_pure(&DenseState::random(n, rng)?, w / total);
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    #[test]
    fn twirl_of_zero_by_hand() {
        // ¼(|0⟩⟨0| + |1⟩⟨1| + |+⟩⟨+| + |−⟩⟨−|)
        let zero = DensityMatrix::from_pure(&DenseState::zero(1).unwrap());
        let out = perfect_encryption_transform(&zero).unwrap();
        let half = Complex64::new(0.5, 0.0);
        assert!((out.get(0, 0) - half).norm() < 1e-15);
        assert!((out.get(1, 1) - half).norm() < 1e-15);
        assert!(out.get(0, 1).norm() < 1e-15);
    }

    #[test]
    fn twirl_of_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            for terms in [1, 4] {
                let rho = random_density_matrix(n, terms, &mut rng).unwrap();
                rho.validate().unwrap();
                let (ok, dev) = check_maximally_mixed(&perfect_encryption_transform(&rho).unwrap(), 1e-10).unwrap();
                assert!(ok, "n={n} dev={dev}");
            }
        }
    }

    #[test]
    fn check_maximally_mixed_examples() {
        assert_eq!(check_maximally_mixed(&DensityMatrix::maximally_mixed(3).unwrap(), 0.0).unwrap(), (true, 0.0));
        let zero = DensityMatrix::from_pure(&DenseState::zero(1).unwrap());
        let (ok, dev) = check_maximally_mixed(&zero, 1e-10).unwrap();
        assert!(!ok);
        assert!((dev - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ensembles_are_maximally_mixed_at_n2() {
        for domain in [KeyDomain::Omega, KeyDomain::Nonzero, KeyDomain::All] {
            for bit in [false, true] {
                let (ok, dev) = check_maximally_mixed(&ensemble_mixture(2, bit, domain).unwrap(), 1e-10).unwrap();
                assert!(ok, "{domain} bit={bit} dev={dev}");
            }
        }
        assert_eq!(ensemble_keys(2, KeyDomain::Omega).len(), 32);
        assert_eq!(ensemble_keys(2, KeyDomain::Nonzero).len(), 48);
        assert_eq!(ensemble_keys(2, KeyDomain::All).len(), 64);
    }

    #[test]
    fn ciphertext_dense_agrees_with_protocol() {
        let k = KeyTriple::new(bv("0111"), bv("1010"), bv("0011")).unwrap();
        let pk = crate::scheme::public_state(&k).unwrap();
        for bit in [false, true] {
            let sym = crate::scheme::encrypt_state(&pk, bit).expand().unwrap();
            assert!(sym.max_abs_diff(&ciphertext_dense(&k, bit).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn mixture_order_and_reduction_invariance() {
        let keys = ensemble_keys(3, KeyDomain::Omega);
        let a = mixture_over(3, true, &keys).unwrap();
        let b = mixture_over_sequential(3, true, &keys).unwrap();
        let mut shuffled = keys.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.gen_range(0..=i));
        }
        let c = mixture_over(3, true, &shuffled).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
        assert!(a.max_abs_diff(&c) < 1e-12);
    }

    #[test]
    fn distances_vanish_at_n2() {
        assert!(proposition1_distance(2).unwrap() < 1e-10);
        for bit in [false, true] {
            assert!(proposition2_distance(2, bit).unwrap() < 1e-10);
        }
    }

    #[test]
    fn dressing_operators_are_orthogonal_at_n1() {
        let ops: Vec<_> = (0..4)
            .map(|ab| dressing_operator(&BitVec::from_index(ab >> 1, 1), &BitVec::from_index(ab & 1, 1)).unwrap())
            .collect();
        for (i, a) in ops.iter().enumerate() {
            for (j, b) in ops.iter().enumerate() {
                let t = hilbert_schmidt(a, b);
                if i == j {
                    assert!((t.norm() - 2.0).abs() < 1e-12);
                } else {
                    assert!(t.norm() < 1e-12, "{i} {j} {t}");
                }
            }
        }
    }

    #[test]
    fn dressing_operators_are_orthogonal_at_n2_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..40 {
            let p: Vec<BitVec> = (0..4).map(|_| BitVec::random(2, &mut rng)).collect();
            let a = dressing_operator(&p[0], &p[1]).unwrap();
            let b = dressing_operator(&p[2], &p[3]).unwrap();
            let t = hilbert_schmidt(&a, &b);
            if (&p[0], &p[1]) == (&p[2], &p[3]) {
                assert!((t.norm() - 4.0).abs() < 1e-12);
            } else {
                assert!(t.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn report_lines() {
        let r = ClaimReport::at_most("prop1", 1e-17, 1e-10);
        assert!(r.pass);
        assert!(r.to_string().starts_with("claim=prop1 value="));
        assert!(r.to_string().ends_with("result=PASS"));
        assert!(!ClaimReport::at_most("x", 0.5, 0.1).pass);
        assert!(render_reports(&[r]).lines().count() == 3);
    }
}
