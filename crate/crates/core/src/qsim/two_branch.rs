use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{check_capacity, DenseState, Pauli, PhasePower, DENSE_LIMIT};
use crate::bits::BitVec;
use crate::error::{check_len, Error, Result};

/// `ω · Y^y H^h (|u⟩ + i^rel |v⟩) / √2` with `u ≠ v`.
///
/// The dressing masks are never expanded: Y and H act on whole qubits, so
/// every protocol operation reduces to mask arithmetic and fourth-root
/// phase bookkeeping. The global phase `ω` is kept so that expansion can be
/// compared amplitude-for-amplitude with the dense engine.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoBranchState {
    u: BitVec,
    v: BitVec,
    rel: PhasePower,
    global: PhasePower,
    h_mask: BitVec,
    y_mask: BitVec,
}

impl TwoBranchState {
    pub fn new(
        u: BitVec,
        v: BitVec,
        rel: PhasePower,
        global: PhasePower,
        h_mask: BitVec,
        y_mask: BitVec,
    ) -> Result<Self> {
        let n = u.len();
        check_len(n, v.len())?;
        check_len(n, h_mask.len())?;
        check_len(n, y_mask.len())?;
        if u == v {
            return Err(Error::Parameter("two-branch state needs distinct branches".into()));
        }
        Ok(Self { u, v, rel, global, h_mask, y_mask })
    }

    /// `(|u⟩ + |v⟩)/√2` with no dressing.
    pub fn plain(u: BitVec, v: BitVec) -> Result<Self> {
        let n = u.len();
        Self::new(u, v, PhasePower::ONE, PhasePower::ONE, BitVec::zeros(n), BitVec::zeros(n))
    }

    pub fn qubits(&self) -> usize {
        self.u.len()
    }

    pub fn u(&self) -> &BitVec {
        &self.u
    }

    pub fn v(&self) -> &BitVec {
        &self.v
    }

    pub fn rel(&self) -> PhasePower {
        self.rel
    }

    pub fn global(&self) -> PhasePower {
        self.global
    }

    pub fn h_mask(&self) -> &BitVec {
        &self.h_mask
    }

    pub fn y_mask(&self) -> &BitVec {
        &self.y_mask
    }

    pub fn is_undressed(&self) -> bool {
        self.h_mask.is_zero() && self.y_mask.is_zero()
    }

    pub fn with_masks(mut self, h_mask: BitVec, y_mask: BitVec) -> Result<Self> {
        check_len(self.qubits(), h_mask.len())?;
        check_len(self.qubits(), y_mask.len())?;
        self.h_mask = h_mask;
        self.y_mask = y_mask;
        Ok(self)
    }

    /// If the branch set is `{a, b}`, the phase of `|b⟩` relative to `|a⟩`.
    pub fn relative_phase_of(&self, a: &BitVec, b: &BitVec) -> Option<PhasePower> {
        if &self.u == a && &self.v == b {
            Some(self.rel)
        } else if &self.u == b && &self.v == a {
            Some(self.rel.conj())
        } else {
            None
        }
    }

    pub fn expand(&self) -> Result<DenseState> {
        self.expand_with_limit(DENSE_LIMIT)
    }

    /// Literal gate-by-gate evaluation on the dense engine.
    pub fn expand_with_limit(&self, limit: usize) -> Result<DenseState> {
        let n = self.qubits();
        check_capacity(n, limit)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[self.u.to_index()] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        amps[self.v.to_index()] = self.rel.to_complex() * FRAC_1_SQRT_2;
        let mut psi = DenseState::from_amplitudes(n, amps)?;
        for q in self.h_mask.ones_positions() {
            psi.h(q)?;
        }
        for q in self.y_mask.ones_positions() {
            psi.pauli(Pauli::Y, q)?;
        }
        psi.scale(self.global.to_complex());
        Ok(psi)
    }

    /// `Y^{⊗n}` applied to the whole state: flips every bit of the Y mask.
    pub fn apply_y_all(&self) -> Self {
        let mut out = self.clone();
        out.y_mask = self.y_mask.complement();
        out
    }

    /// Applies `H^{k2} Y^{k3}`, the inverse of the `Y^{k3} H^{k2}` dressing.
    ///
    /// Requires `h = k2` and `y ⊕ k3 ∈ {0ⁿ, 1ⁿ}`. In the second case the
    /// leftover `Y^{⊗n}` is conjugated through `H^{k2}` (each `HYH = −Y`) and
    /// applied to the branches: `Y^{⊗n}|x⟩ = iⁿ (−1)^{|x|} |x̄⟩`.
    pub fn undo_dressing(&self, k2: &BitVec, k3: &BitVec) -> Result<Self> {
        let n = self.qubits();
        check_len(n, k2.len())?;
        check_len(n, k3.len())?;
        if &self.h_mask != k2 {
            return Err(Error::CiphertextMismatch);
        }
        let residual = self.y_mask.xor(k3)?;
        let mut out = self.clone();
        out.h_mask = BitVec::zeros(n);
        out.y_mask = BitVec::zeros(n);
        if residual.is_zero() {
            return Ok(out);
        }
        if !residual.is_ones() {
            return Err(Error::CiphertextMismatch);
        }
        out.global = self.global
            * PhasePower::sign(k2.weight())
            * PhasePower::new(n as i64)
            * PhasePower::sign(self.u.weight());
        out.rel = self.rel * PhasePower::sign(self.u.weight() + self.v.weight());
        out.u = self.u.complement();
        out.v = self.v.complement();
        Ok(out)
    }

    /// `Z^{⊗n}` on an undressed state.
    pub fn apply_z_all(&self) -> Result<Self> {
        if !self.is_undressed() {
            return Err(Error::UnsupportedState("Z on a dressed state is not symbolic"));
        }
        let mut out = self.clone();
        out.global = self.global * PhasePower::sign(self.u.weight());
        out.rel = self.rel * PhasePower::sign(self.u.weight() + self.v.weight());
        Ok(out)
    }

    /// `X^mask` on an undressed state.
    pub fn apply_x_mask(&self, mask: &BitVec) -> Result<Self> {
        if !self.is_undressed() {
            return Err(Error::UnsupportedState("X on a dressed state is not symbolic"));
        }
        let mut out = self.clone();
        out.u = self.u.xor(mask)?;
        out.v = self.v.xor(mask)?;
        Ok(out)
    }
}

impl fmt::Display for TwoBranchState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} u={} v={} rel={} global={} h={} y={}",
            self.qubits(),
            self.u,
            self.v,
            self.rel,
            self.global,
            self.h_mask,
            self.y_mask
        )
    }
}

impl FromStr for TwoBranchState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut fields = s.split_whitespace();
        let mut take = |key: &str| -> Result<&str> {
            let tok = fields
                .next()
                .ok_or_else(|| Error::Parse(format!("missing field {key} in {s:?}")))?;
            tok.strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| Error::Parse(format!("expected {key}=…, got {tok:?}")))
        };
        let n: usize = take("n")?
            .parse()
            .map_err(|e| Error::Parse(format!("bad qubit count: {e}")))?;
        let u: BitVec = take("u")?.parse()?;
        let v: BitVec = take("v")?.parse()?;
        let phase = |t: &str| -> Result<PhasePower> {
            match t {
                "0" | "1" | "2" | "3" => Ok(PhasePower::new(t.parse::<i64>().unwrap())),
                _ => Err(Error::Parse(format!("phase must be 0..3, got {t:?}"))),
            }
        };
        let rel = phase(take("rel")?)?;
        let global = phase(take("global")?)?;
        let h: BitVec = take("h")?.parse()?;
        let y: BitVec = take("y")?.parse()?;
        if fields.next().is_some() {
            return Err(Error::Parse(format!("trailing fields in {s:?}")));
        }
        check_len(n, u.len())?;
        Self::new(u, v, rel, global, h, y)
    }
}
