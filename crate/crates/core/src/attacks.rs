//! Adversaries: the Hadamard-measurement key-recovery attack, Boolean
//! function coefficient recovery, partial-key guessing and the multi-copy
//! distinguishability computation.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::bits::{BitVec, Gf2Solution, Gf2System};
use crate::error::{check_len, Error, Result};
use crate::py12::{py12_decrypt_dense_sampled, py12_encrypt, py12_state};
use crate::qsim::{check_capacity, sample_index, DensityMatrix, TwoBranchState, DENSE_LIMIT};
use crate::scheme::{encrypt_state, public_state, KeyTriple};
use crate::trial_rng;

/// Value the guessing remark states in words for a single missing bit.
pub const GUESS_PROSE_VALUE: f64 = 0.25;
/// Largest input width accepted by [`recover_boolean_function`].
pub const MAX_RECOVERY_INPUTS: usize = 16;

/// Born distribution of `H^{⊗n}` applied to a state, cached for repeated
/// sampling.
#[derive(Clone, Debug)]
pub struct HadamardSampler {
    n: usize,
    probs: Vec<f64>,
}

impl HadamardSampler {
    pub fn new(state: &TwoBranchState) -> Result<Self> {
        let n = state.qubits();
        let psi = state.expand()?.apply_hadamard_mask(&BitVec::ones(n))?;
        Ok(Self { n, probs: psi.probabilities() })
    }

    pub fn probability(&self, y: &BitVec) -> f64 {
        self.probs[y.to_index()]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVec {
        let idx = sample_index(&self.probs, rng).expect("normalized distribution");
        BitVec::from_index(idx, self.n)
    }
}

/// One computational-basis outcome after Hadamards on every qubit.
pub fn hadamard_attack_sample<R: Rng + ?Sized>(state: &TwoBranchState, rng: &mut R) -> Result<BitVec> {
    Ok(HadamardSampler::new(state)?.sample(rng))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recovery {
    Recovered(BitVec),
    Insufficient { rank: usize },
}

/// Solves `y · k = 0` over the samples; succeeds when the solution space is
/// exactly `{0, k}`.
pub fn recover_k_from_samples(samples: &[BitVec], n: usize) -> Result<Recovery> {
    let sys = Gf2System::homogeneous(n, samples.to_vec())?;
    let null = sys.nullspace();
    Ok(match <[BitVec; 1]>::try_from(null) {
        Ok([k]) => Recovery::Recovered(k),
        Err(_) => Recovery::Insufficient { rank: sys.rank() },
    })
}

/// Sample-by-sample record of one Hadamard attack.
#[derive(Clone, Debug)]
pub struct AttackRun {
    pub samples: Vec<BitVec>,
    /// Rank of the sample matrix after each sample.
    pub ranks: Vec<usize>,
    pub outcome: Recovery,
}

impl AttackRun {
    pub fn recovered(&self) -> Option<&BitVec> {
        match &self.outcome {
            Recovery::Recovered(k) => Some(k),
            Recovery::Insufficient { .. } => None,
        }
    }
}

/// Draws samples until the nullspace is one-dimensional or `max_samples`
/// is reached.
pub fn run_hadamard_attack<R: Rng + ?Sized>(
    state: &TwoBranchState,
    max_samples: usize,
    rng: &mut R,
) -> Result<AttackRun> {
    let n = state.qubits();
    let sampler = HadamardSampler::new(state)?;
    let mut sys = Gf2System::homogeneous(n, Vec::new())?;
    let mut samples = Vec::new();
    let mut ranks = Vec::new();
    let mut outcome = Recovery::Insufficient { rank: 0 };
    for _ in 0..max_samples {
        let y = sampler.sample(rng);
        sys.push(y.clone())?;
        samples.push(y);
        outcome = recover_k_from_samples(sys.rows(), n)?;
        ranks.push(match outcome {
            Recovery::Recovered(_) => n - 1,
            Recovery::Insufficient { rank } => rank,
        });
        if matches!(outcome, Recovery::Recovered(_)) {
            break;
        }
    }
    Ok(AttackRun { samples, ranks, outcome })
}

/// End-to-end attack on one freshly drawn baseline key.
#[derive(Clone, Debug)]
pub struct Py12AttackTranscript {
    pub k: BitVec,
    pub i: BitVec,
    pub run: AttackRun,
}

impl Py12AttackTranscript {
    pub fn success(&self) -> bool {
        self.run.recovered() == Some(&self.k)
    }

    /// Every sample is orthogonal to the true `k`.
    pub fn samples_orthogonal(&self) -> bool {
        self.run.samples.iter().all(|y| !y.dot(&self.k).unwrap_or(true))
    }
}

impl fmt::Display for Py12AttackTranscript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "target k={} i={}", self.k, self.i)?;
        for (t, (y, r)) in self.run.samples.iter().zip(&self.run.ranks).enumerate() {
            writeln!(f, "sample {:>3} y={} y.k={} rank={}", t + 1, y, y.dot(&self.k).unwrap_or(true) as u8, r)?;
        }
        match self.run.recovered() {
            Some(k) => writeln!(f, "recovered k={} correct={}", k, k == &self.k),
            None => writeln!(f, "recovered none"),
        }?;
        writeln!(f, "samples used={}", self.run.samples.len())
    }
}

pub fn py12_attack<R: Rng + ?Sized>(n: usize, max_samples: usize, rng: &mut R) -> Result<Py12AttackTranscript> {
    check_capacity(n, DENSE_LIMIT)?;
    let k = BitVec::random_odd(n, rng);
    let i = BitVec::random(n, rng);
    let run = run_hadamard_attack(&py12_state(&k, &i)?, max_samples, rng)?;
    Ok(Py12AttackTranscript { k, i, run })
}

/// Aggregate of repeated attacks.
#[derive(Clone, Debug, PartialEq)]
pub struct AttackRate {
    pub trials: usize,
    pub successes: usize,
    /// Trials where every sample was orthogonal to the target key.
    pub orthogonal: usize,
}

impl AttackRate {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Repeats the baseline attack; trial `t` uses stream `t` of `seed`.
pub fn py12_attack_rate(n: usize, max_samples: usize, trials: usize, seed: u64) -> Result<AttackRate> {
    let results = (0..trials)
        .into_par_iter()
        .map(|t| {
            let tr = py12_attack(n, max_samples, &mut trial_rng(seed, t as u64))?;
            Ok((tr.success(), tr.samples_orthogonal()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tally(trials, &results))
}

/// The same pipeline against dressed public keys with uniform `(k1, k2, k3)`;
/// success means the recovered vector equals `k1`.
pub fn newscheme_attack_rate(n: usize, max_samples: usize, trials: usize, seed: u64) -> Result<AttackRate> {
    check_capacity(n, DENSE_LIMIT)?;
    let results = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let k = KeyTriple::random(n, &mut rng);
            let run = run_hadamard_attack(&public_state(&k)?, max_samples, &mut rng)?;
            let orthogonal = run.samples.iter().all(|y| !y.dot(&k.k1).unwrap_or(true));
            Ok((run.recovered() == Some(&k.k1), orthogonal))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tally(trials, &results))
}

fn tally(trials: usize, results: &[(bool, bool)]) -> AttackRate {
    AttackRate {
        trials,
        successes: results.iter().filter(|r| r.0).count(),
        orthogonal: results.iter().filter(|r| r.1).count(),
    }
}

/// Algebraic normal form recovered from input/output pairs: one coefficient
/// per monomial mask (indexed big-endian) per output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveredFunction {
    m: usize,
    coefficients: Vec<BitVec>,
    underdetermined: bool,
}

impl RecoveredFunction {
    pub fn inputs(&self) -> usize {
        self.m
    }

    pub fn outputs(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self, j: usize) -> &BitVec {
        &self.coefficients[j]
    }

    /// True when the pairs do not pin down a unique normal form.
    pub fn is_underdetermined(&self) -> bool {
        self.underdetermined
    }

    pub fn eval(&self, s: &BitVec) -> Result<BitVec> {
        check_len(self.m, s.len())?;
        let rows = monomial_row(s);
        let mut out = BitVec::zeros(self.outputs());
        for (j, c) in self.coefficients.iter().enumerate() {
            out.set(j, rows.dot(c)?);
        }
        Ok(out)
    }
}

// coefficient row of s: entry a is set when mask a ⊆ s
fn monomial_row(s: &BitVec) -> BitVec {
    let m = s.len();
    let x = s.to_index();
    let mut row = BitVec::zeros(1 << m);
    for a in 0..1usize << m {
        if a & !x == 0 {
            row.set(a, true);
        }
    }
    row
}

pub fn recover_boolean_function(pairs: &[(BitVec, BitVec)], m: usize, n: usize) -> Result<RecoveredFunction> {
    if m == 0 || n == 0 {
        return Err(Error::Parameter("m and n must be at least 1".into()));
    }
    if m > MAX_RECOVERY_INPUTS {
        return Err(Error::Parameter(format!("m = {m} exceeds {MAX_RECOVERY_INPUTS}")));
    }
    for (s, k) in pairs {
        check_len(m, s.len())?;
        check_len(n, k.len())?;
    }
    let rows: Vec<BitVec> = pairs.iter().map(|(s, _)| monomial_row(s)).collect();
    let mut coefficients = Vec::with_capacity(n);
    let mut underdetermined = false;
    for j in 0..n {
        let rhs = pairs.iter().map(|(_, k)| k.get(j)).collect();
        match Gf2System::with_rhs(1 << m, rows.clone(), rhs)?.solve() {
            Gf2Solution::Consistent { particular, nullspace } => {
                underdetermined |= !nullspace.is_empty();
                coefficients.push(particular);
            }
            Gf2Solution::Inconsistent => return Err(Error::InconsistentObservations),
        }
    }
    Ok(RecoveredFunction { m, coefficients, underdetermined })
}

/// Monte Carlo estimate of the partial-key guessing attack.
#[derive(Clone, Debug, PartialEq)]
pub struct GuessingReport {
    pub n: usize,
    pub missing: usize,
    pub trials: usize,
    pub successes: usize,
    /// 95% normal-approximation half-width.
    pub half_width: f64,
    /// `1/2^l + (1 − 1/2^l)/2`.
    pub closed_form: f64,
    pub prose_value: f64,
}

impl GuessingReport {
    pub fn estimate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    pub fn matches_closed_form(&self, tol: f64) -> bool {
        (self.estimate() - self.closed_form).abs() <= tol
    }

    pub fn matches_prose(&self, tol: f64) -> bool {
        (self.estimate() - self.prose_value).abs() <= tol
    }
}

impl fmt::Display for GuessingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={} missing={} trials={}", self.n, self.missing, self.trials)?;
        writeln!(f, "estimate={:.6} half_width={:.6}", self.estimate(), self.half_width)?;
        writeln!(f, "closed_form={:.6} reproduced={}", self.closed_form, self.matches_closed_form(0.02))?;
        writeln!(f, "prose_value={:.6} reproduced={}", self.prose_value, self.matches_prose(0.02))
    }
}

pub fn guessing_closed_form(missing: usize) -> f64 {
    let p = 0.5f64.powi(missing as i32);
    p + 0.5 * (1.0 - p)
}

/// The attacker knows `i` and the first `n − l` bits of `k`, guesses the
/// last `l` uniformly, and decodes a fresh ciphertext of a random bit with
/// the baseline decryption circuit. Trial `t` uses stream `t` of `seed`.
pub fn guessing_attack_estimate(n: usize, missing: usize, trials: usize, seed: u64) -> Result<GuessingReport> {
    if missing == 0 || missing >= n {
        return Err(Error::Parameter(format!("missing bits must satisfy 1 <= l < n, got l={missing}, n={n}")));
    }
    if trials == 0 {
        return Err(Error::Parameter("trials must be positive".into()));
    }
    check_capacity(n, DENSE_LIMIT)?;
    let successes = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<usize> {
            let mut rng = trial_rng(seed, t as u64);
            let k = BitVec::random_odd(n, &mut rng);
            let i = BitVec::random(n, &mut rng);
            let mut guess = k.clone();
            for q in n - missing..n {
                guess.set(q, rng.gen());
            }
            let bit = rng.gen::<bool>();
            let ct = py12_encrypt(&py12_state(&k, &i)?, bit)?.expand()?;
            Ok((py12_decrypt_dense_sampled(&guess, &i, &ct, &mut rng)? == bit) as usize)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let p = successes as f64 / trials as f64;
    Ok(GuessingReport {
        n,
        missing,
        trials,
        successes,
        half_width: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
        closed_form: guessing_closed_form(missing),
        prose_value: GUESS_PROSE_VALUE,
    })
}

/// Amplitudes of a two-branch state as Gaussian integers over a common
/// `√2^shift` denominator.
pub(crate) fn exact_amplitudes(state: &TwoBranchState) -> (Vec<(i64, i64)>, usize) {
    let n = state.qubits();
    let h = state.h_mask().to_index();
    let y = state.y_mask().to_index();
    let y_weight = state.y_mask().weight();
    let mut amps = vec![(0i64, 0i64); 1 << n];
    let branches = [(state.u().to_index(), 0u8), (state.v().to_index(), state.rel().exponent())];
    for (x, phase) in branches {
        // H^h|x⟩ = Σ_z (−1)^{|x∧z∧h|} |z⟩ over z agreeing with x off h
        let fixed = x & !h;
        let mut sub = h;
        loop {
            let z = fixed | sub;
            let mut e = phase as u32 + 2 * (x & z & h).count_ones();
            // Y^y|z⟩ = i^{|y|} (−1)^{|z∧y|} |z⊕y⟩
            e += y_weight as u32 + 2 * (z & y).count_ones();
            e += state.global().exponent() as u32;
            let (re, im) = i_power(e);
            let slot = &mut amps[z ^ y];
            slot.0 += re;
            slot.1 += im;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & h;
        }
    }
    (amps, 1 + state.h_mask().weight())
}

fn i_power(e: u32) -> (i64, i64) {
    match e % 4 {
        0 => (1, 0),
        1 => (0, 1),
        2 => (-1, 0),
        _ => (0, -1),
    }
}

fn gauss_mul(a: (i128, i128), b: (i128, i128)) -> (i128, i128) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// Integer accumulator for density matrices whose entries are dyadic
/// Gaussian rationals; sums are exact and therefore order-independent.
#[derive(Clone, Debug, PartialEq, Eq)]
struct ExactSum {
    dim: usize,
    entries: Vec<(i128, i128)>,
    terms: u64,
}

impl ExactSum {
    fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![(0, 0); dim * dim], terms: 0 }
    }

    // adds |a⟩⟨a| · 2^lift
    fn add_outer(&mut self, amps: &[(i128, i128)], lift: u32) {
        for (r, &a) in amps.iter().enumerate() {
            if a == (0, 0) {
                continue;
            }
            for (c, &b) in amps.iter().enumerate() {
                if b == (0, 0) {
                    continue;
                }
                let (re, im) = gauss_mul(a, (b.0, -b.1));
                let slot = &mut self.entries[r * self.dim + c];
                slot.0 += re << lift;
                slot.1 += im << lift;
            }
        }
        self.terms += 1;
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            a.0 += b.0;
            a.1 += b.1;
        }
        self.terms += other.terms;
        self
    }
}

fn all_keys(n: usize) -> impl Iterator<Item = KeyTriple> {
    let odd: Vec<usize> = (0..1usize << n).filter(|x| x.count_ones() % 2 == 1).collect();
    odd.into_iter().flat_map(move |k1| {
        (0..1usize << (2 * n)).map(move |masks| KeyTriple {
            k1: BitVec::from_index(k1, n),
            k2: BitVec::from_index(masks >> n, n),
            k3: BitVec::from_index(masks & ((1 << n) - 1), n),
        })
    })
}

/// Uniform mixture over every `(k1 ∈ Ω_n, k2, k3)` of the `t`-fold tensor
/// product of ciphertexts for `pattern`, all copies under the same key.
pub fn multi_copy_mixture(n: usize, pattern: &[bool]) -> Result<DensityMatrix> {
    let keys: Vec<KeyTriple> = all_keys(n).collect();
    multi_copy_mixture_over(n, pattern, &keys)
}

/// As [`multi_copy_mixture`], summing over `keys` in the order given.
pub fn multi_copy_mixture_over(n: usize, pattern: &[bool], keys: &[KeyTriple]) -> Result<DensityMatrix> {
    let t = pattern.len();
    if t == 0 || n == 0 {
        return Err(Error::Parameter("need at least one copy and one qubit".into()));
    }
    if keys.is_empty() {
        return Err(Error::Parameter("empty key ensemble".into()));
    }
    check_capacity(t * n, DENSE_LIMIT)?;
    for k in keys {
        check_len(n, k.qubits())?;
    }
    let dim = 1usize << (t * n);
    let full_shift = (t * (n + 1)) as u32;
    let sum = keys
        .par_iter()
        .try_fold(
            || ExactSum::zeros(dim),
            |mut acc, k| -> Result<ExactSum> {
                let pk = public_state(k)?;
                let mut amps = vec![(1i128, 0i128)];
                let mut shift = 0u32;
                for &bit in pattern {
                    let (copy, s) = exact_amplitudes(&encrypt_state(&pk, bit));
                    amps = amps
                        .iter()
                        .flat_map(|&a| copy.iter().map(move |&b| gauss_mul(a, (b.0 as i128, b.1 as i128))))
                        .collect();
                    shift += s as u32;
                }
                // |a⟩⟨a| / 2^shift, lifted to the common 2^full_shift denominator
                acc.add_outer(&amps, full_shift - shift);
                Ok(acc)
            },
        )
        .try_reduce(|| ExactSum::zeros(dim), |a, b| Ok(a.merge(b)))?;
    let denom = (sum.terms as f64) * 2f64.powi(full_shift as i32);
    let entries = sum
        .entries
        .iter()
        .map(|&(re, im)| num_complex::Complex64::new(re as f64 / denom, im as f64 / denom))
        .collect();
    DensityMatrix::from_entries(t * n, entries)
}

/// Trace distance between the mixtures of `pattern` and every other pattern
/// of the same length, in lexicographic order.
pub fn multi_copy_distances(n: usize, pattern: &[bool]) -> Result<Vec<(Vec<bool>, f64)>> {
    let t = pattern.len();
    let base = multi_copy_mixture(n, pattern)?;
    (0..1usize << t)
        .map(|x| {
            let other: Vec<bool> = (0..t).map(|c| (x >> (t - 1 - c)) & 1 == 1).collect();
            let d = if other == pattern {
                0.0
            } else {
                base.trace_distance(&multi_copy_mixture(n, &other)?)?
            };
            Ok((other, d))
        })
        .collect()
}

#[cfg(test)]
fn dense_from_exact(n: usize, amps: &[(i64, i64)], shift: usize) -> Result<crate::qsim::DenseState> {
    let scale = 2f64.powf(-(shift as f64) / 2.0);
    crate::qsim::DenseState::from_amplitudes(
        n,
        amps.iter()
            .map(|&(re, im)| num_complex::Complex64::new(re as f64 * scale, im as f64 * scale))
            .collect(),
    )
}
