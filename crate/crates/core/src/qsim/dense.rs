use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use super::{check_capacity, DENSE_LIMIT};
use crate::bits::BitVec;
use crate::error::{check_len, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub(super) type Gate2 = [[Complex64; 2]; 2];

pub(super) const H_GATE: Gate2 = [
    [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0)],
    [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(-FRAC_1_SQRT_2, 0.0)],
];
const X_GATE: Gate2 = [[ZERO, ONE], [ONE, ZERO]];
const Y_GATE: Gate2 = [[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]];
const Z_GATE: Gate2 = [[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub(super) fn matrix(self) -> &'static Gate2 {
        match self {
            Pauli::X => &X_GATE,
            Pauli::Y => &Y_GATE,
            Pauli::Z => &Z_GATE,
        }
    }
}

/// Gates used by the preparation and decryption circuits. Qubit indices are
/// zero-based from the left.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    Pauli(Pauli, usize),
    Cnot { control: usize, target: usize },
}

/// A gate list applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Circuit {
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
    }

    pub fn hadamard_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::H(_))).count()
    }

    pub fn apply(&self, state: &mut DenseState) -> Result<()> {
        for &g in &self.gates {
            match g {
                Gate::H(q) => state.h(q)?,
                Gate::Pauli(p, q) => state.pauli(p, q)?,
                Gate::Cnot { control, target } => state.cnot(control, target)?,
            }
        }
        Ok(())
    }
}

/// Outcome of a `{|+⟩, |−⟩}` measurement on one qubit. A post-measurement
/// state is absent when its branch has zero probability.
#[derive(Clone, Debug)]
pub struct PmOutcome {
    pub prob_plus: f64,
    pub prob_minus: f64,
    pub post_plus: Option<DenseState>,
    pub post_minus: Option<DenseState>,
}

/// `2^n` amplitudes; basis index bit `n-1-q` holds qubit `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// `|0…0⟩` on `n` qubits, subject to [`DENSE_LIMIT`].
    pub fn zero(n: usize) -> Result<Self> {
        Self::zero_with_limit(n, DENSE_LIMIT)
    }

    pub fn zero_with_limit(n: usize, limit: usize) -> Result<Self> {
        check_capacity(n, limit)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Self { n, amps })
    }

    pub fn basis(bits: &BitVec) -> Result<Self> {
        let mut s = Self::zero(bits.len())?;
        s.amps[0] = ZERO;
        s.amps[bits.to_index()] = ONE;
        Ok(s)
    }

    /// Wraps raw amplitudes; the norm must be 1 within `1e-12`.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_capacity(n, DENSE_LIMIT)?;
        check_len(1 << n, amps.len())?;
        let s = Self { n, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("state norm² is {norm}, expected 1")));
        }
        Ok(s)
    }

    /// Random state with Gaussian amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_capacity(n, DENSE_LIMIT)?;
        let mut amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self { n, amps })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, bits: &BitVec) -> Complex64 {
        self.amps[bits.to_index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn scale(&mut self, factor: Complex64) {
        for a in &mut self.amps {
            *a *= factor;
        }
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        check_len(self.n, other.n)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max amplitude difference after aligning the global phase of `other`
    /// to `self`.
    pub fn phase_aligned_diff(&self, other: &Self) -> f64 {
        let overlap = other.inner(self).unwrap_or(ZERO);
        if overlap.norm() < 1e-15 {
            return f64::INFINITY;
        }
        let mut aligned = other.clone();
        aligned.scale(overlap / overlap.norm());
        self.max_abs_diff(&aligned)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_capacity(self.n + other.n, DENSE_LIMIT)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { n: self.n + other.n, amps })
    }

    fn qubit_mask(&self, q: usize) -> Result<usize> {
        if q >= self.n {
            return Err(Error::Index { what: "qubit", index: q, len: self.n });
        }
        Ok(1 << (self.n - 1 - q))
    }

    fn apply_single(&mut self, q: usize, g: &Gate2) -> Result<()> {
        let bit = self.qubit_mask(q)?;
        for i0 in 0..self.amps.len() {
            if i0 & bit != 0 {
                continue;
            }
            let i1 = i0 | bit;
            let (x0, x1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = g[0][0] * x0 + g[0][1] * x1;
            self.amps[i1] = g[1][0] * x0 + g[1][1] * x1;
        }
        Ok(())
    }

    pub fn h(&mut self, q: usize) -> Result<()> {
        self.apply_single(q, &H_GATE)
    }

    /// `X|b⟩ = |b̄⟩`, `Y|b⟩ = i(−1)^b|b̄⟩`, `Z|b⟩ = (−1)^b|b⟩`.
    pub fn pauli(&mut self, p: Pauli, q: usize) -> Result<()> {
        self.apply_single(q, p.matrix())
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        if control == target {
            return Err(Error::Parameter("CNOT control and target must differ".into()));
        }
        let c = self.qubit_mask(control)?;
        let t = self.qubit_mask(target)?;
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
        Ok(())
    }

    pub fn apply_hadamard_mask(&self, mask: &BitVec) -> Result<Self> {
        check_len(self.n, mask.len())?;
        let mut out = self.clone();
        for q in mask.ones_positions() {
            out.h(q)?;
        }
        Ok(out)
    }

    pub fn apply_pauli_mask(&self, which: Pauli, mask: &BitVec) -> Result<Self> {
        check_len(self.n, mask.len())?;
        let mut out = self.clone();
        for q in mask.ones_positions() {
            out.pauli(which, q)?;
        }
        Ok(out)
    }

    pub fn apply_cnot(&self, control: usize, target: usize) -> Result<Self> {
        let mut out = self.clone();
        out.cnot(control, target)?;
        Ok(out)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Samples a computational-basis outcome from the Born distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVec {
        sample_index(&self.probabilities(), rng)
            .map(|i| BitVec::from_index(i, self.n))
            .expect("normalized state has a positive-probability outcome")
    }

    pub fn measure_pm(&self, q: usize) -> Result<PmOutcome> {
        let bit = self.qubit_mask(q)?;
        let mut plus = self.clone();
        let mut minus = self.clone();
        let (mut pp, mut pm) = (0.0, 0.0);
        for i0 in 0..self.amps.len() {
            if i0 & bit != 0 {
                continue;
            }
            let i1 = i0 | bit;
            let (x0, x1) = (self.amps[i0], self.amps[i1]);
            let a = (x0 + x1) * 0.5;
            let b = (x0 - x1) * 0.5;
            plus.amps[i0] = a;
            plus.amps[i1] = a;
            minus.amps[i0] = b;
            minus.amps[i1] = -b;
            pp += 2.0 * a.norm_sqr();
            pm += 2.0 * b.norm_sqr();
        }
        let normalize = |mut s: DenseState, p: f64| {
            (p > 1e-24).then(|| {
                s.scale(Complex64::new(1.0 / p.sqrt(), 0.0));
                s
            })
        };
        Ok(PmOutcome {
            prob_plus: pp,
            prob_minus: pm,
            post_plus: normalize(plus, pp),
            post_minus: normalize(minus, pm),
        })
    }
}

pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = probs.iter().sum();
    let mut r = rng.gen::<f64>() * total;
    let mut last = None;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 1e-15 {
            continue;
        }
        last = Some(i);
        if r < p {
            return Some(i);
        }
        r -= p;
    }
    last
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
