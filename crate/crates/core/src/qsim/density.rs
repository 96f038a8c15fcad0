use num_complex::Complex64;

use super::dense::{Gate2, H_GATE};
use super::{check_capacity, hermitian_eigenvalues, DenseState, Pauli, DENSE_LIMIT};
use crate::bits::BitVec;
use crate::error::{check_len, Error, Result};

/// `2^n × 2^n` complex matrix, row-major. Construction through
/// [`DensityMatrix::from_pure`] and [`DensityMatrix::mix`] yields a state;
/// [`DensityMatrix::zeros`] and the arithmetic helpers are for building sums.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        check_capacity(n, DENSE_LIMIT)?;
        Ok(Self {
            n,
            entries: vec![Complex64::new(0.0, 0.0); 1 << (2 * n)],
        })
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        let d = m.dim();
        for i in 0..d {
            m.entries[i * d + i] = Complex64::new(1.0 / d as f64, 0.0);
        }
        Ok(m)
    }

    pub fn from_entries(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_capacity(n, DENSE_LIMIT)?;
        check_len(1 << (2 * n), entries.len())?;
        Ok(Self { n, entries })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &DenseState) -> Self {
        let mut m = Self {
            n: psi.qubits(),
            entries: vec![Complex64::new(0.0, 0.0); 1 << (2 * psi.qubits())],
        };
        m.add_pure(psi, 1.0);
        m
    }

    /// Convex combination; weights must be non-negative and sum to 1 within
    /// `1e-12`.
    pub fn mix<'a, I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, &'a DensityMatrix)>,
    {
        let mut acc: Option<Self> = None;
        let mut total = 0.0;
        for (w, rho) in terms {
            if w < 0.0 {
                return Err(Error::Parameter(format!("negative mixture weight {w}")));
            }
            total += w;
            let a = acc.get_or_insert_with(|| Self {
                n: rho.n,
                entries: vec![Complex64::new(0.0, 0.0); rho.entries.len()],
            });
            a.add_scaled(rho, w)?;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::WeightSum(total));
        }
        acc.ok_or(Error::WeightSum(0.0))
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    /// `self += w |ψ⟩⟨ψ|`.
    pub fn add_pure(&mut self, psi: &DenseState, w: f64) {
        assert_eq!(self.n, psi.qubits());
        let d = self.dim();
        let amps = psi.amplitudes();
        for (i, a) in amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let wa = a * w;
            let row = &mut self.entries[i * d..(i + 1) * d];
            for (e, b) in row.iter_mut().zip(amps) {
                *e += wa * b.conj();
            }
        }
    }

    /// `self += w · other`.
    pub fn add_scaled(&mut self, other: &Self, w: f64) -> Result<()> {
        check_len(self.n, other.n)?;
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b * w;
        }
        Ok(())
    }

    pub fn scale(&mut self, w: f64) {
        for e in &mut self.entries {
            *e *= w;
        }
    }

    pub fn trace(&self) -> Complex64 {
        let d = self.dim();
        (0..d).map(|i| self.entries[i * d + i]).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.entries[i * d + j] - self.entries[j * d + i].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(self.dim(), &self.entries)
    }

    /// Checks Hermiticity and unit trace within `1e-12` and eigenvalues
    /// `≥ −1e-10`.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-12 {
            return Err(Error::Parameter(format!("matrix is not Hermitian (error {herm:e})")));
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::Parameter(format!("trace is {tr}, expected 1")));
        }
        let min = self.eigenvalues()?.into_iter().fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(Error::Parameter(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `½ Σ |λ_i|` over the eigenvalues of `self − other`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        check_len(self.dim(), other.dim())?;
        let diff: Vec<Complex64> = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        let ev = hermitian_eigenvalues(self.dim(), &diff)?;
        Ok(0.5 * ev.iter().map(|x| x.abs()).sum::<f64>())
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        check_capacity(self.n + other.n, DENSE_LIMIT)?;
        let (da, db) = (self.dim(), other.dim());
        let d = da * db;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..da {
            for j in 0..da {
                let a = self.entries[i * da + j];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        entries[(i * db + k) * d + (j * db + l)] = a * other.entries[k * db + l];
                    }
                }
            }
        }
        Ok(Self { n: self.n + other.n, entries })
    }

    /// `U ρ U†` for a single-qubit `U` on qubit `q`.
    pub(crate) fn conjugate_single(&mut self, q: usize, g: &Gate2) -> Result<()> {
        if q >= self.n {
            return Err(Error::Index { what: "qubit", index: q, len: self.n });
        }
        let d = self.dim();
        let bit = 1 << (self.n - 1 - q);
        let e = &mut self.entries;
        for i0 in (0..d).filter(|i| i & bit == 0) {
            let i1 = i0 | bit;
            for j in 0..d {
                let (x0, x1) = (e[i0 * d + j], e[i1 * d + j]);
                e[i0 * d + j] = g[0][0] * x0 + g[0][1] * x1;
                e[i1 * d + j] = g[1][0] * x0 + g[1][1] * x1;
            }
        }
        for j0 in (0..d).filter(|j| j & bit == 0) {
            let j1 = j0 | bit;
            for i in 0..d {
                let (x0, x1) = (e[i * d + j0], e[i * d + j1]);
                e[i * d + j0] = x0 * g[0][0].conj() + x1 * g[0][1].conj();
                e[i * d + j1] = x0 * g[1][0].conj() + x1 * g[1][1].conj();
            }
        }
        Ok(())
    }

    /// `H^mask ρ H^mask`.
    pub fn conjugate_hadamard_mask(&self, mask: &BitVec) -> Result<Self> {
        check_len(self.n, mask.len())?;
        let mut out = self.clone();
        for q in mask.ones_positions() {
            out.conjugate_single(q, &H_GATE)?;
        }
        Ok(out)
    }

    /// `P^mask ρ (P^mask)†`.
    pub fn conjugate_pauli_mask(&self, which: Pauli, mask: &BitVec) -> Result<Self> {
        check_len(self.n, mask.len())?;
        let mut out = self.clone();
        for q in mask.ones_positions() {
            out.conjugate_single(q, which.matrix())?;
        }
        Ok(out)
    }
}
