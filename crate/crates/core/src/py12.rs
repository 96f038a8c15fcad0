//! The earlier two-branch scheme used as a baseline and attack target.
//!
//! Public states are `(|i⟩ + |i⊕k⟩)/√2` with `k = F(s)` of odd weight and no
//! dressing. Bit 1 is encrypted by `Z^{⊗n}`, which flips the relative sign.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::bits::BitVec;
use crate::boolfunc::BooleanFunction;
use crate::error::{check_len, Error, Result};
use crate::qsim::{Circuit, DenseState, Gate, Pauli, PhasePower, TwoBranchState};
use crate::scheme::draw_s1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Py12Key {
    f: BooleanFunction,
    s: BitVec,
    k: BitVec,
    i: BitVec,
}

impl Py12Key {
    pub fn generate<R: Rng + ?Sized>(n: usize, m: usize, p: usize, rng: &mut R) -> Result<Self> {
        let f = BooleanFunction::sample(m, n, p, rng)?;
        let s = draw_s1(&f, rng)?;
        let i = BitVec::random(n, rng);
        Self::new(f, s, i)
    }

    pub fn new(f: BooleanFunction, s: BitVec, i: BitVec) -> Result<Self> {
        check_len(f.outputs(), i.len())?;
        let k = f.eval(&s)?;
        if !k.is_odd() {
            return Err(Error::Parameter(format!("k = {k} does not have odd weight")));
        }
        Ok(Self { f, s, k, i })
    }

    pub fn function(&self) -> &BooleanFunction {
        &self.f
    }

    pub fn s(&self) -> &BitVec {
        &self.s
    }

    pub fn k(&self) -> &BitVec {
        &self.k
    }

    pub fn i(&self) -> &BitVec {
        &self.i
    }

    pub fn qubits(&self) -> usize {
        self.k.len()
    }
}

impl fmt::Display for Py12Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.f)?;
        writeln!(f, "s={}", self.s)?;
        writeln!(f, "i={}", self.i)
    }
}

impl FromStr for Py12Key {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let f = BooleanFunction::parse_lines(&mut lines)?;
        let mut field = |key: &str| -> Result<BitVec> {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing {key} line")))?;
            line.strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| Error::Parse(format!("expected {key}=…, got {line:?}")))?
                .parse()
        };
        let s = field("s")?;
        let i = field("i")?;
        if lines.next().is_some() {
            return Err(Error::Parse("trailing content after key".into()));
        }
        Self::new(f, s, i)
    }
}

/// `(|i⟩ + |i⊕k⟩)/√2` for an explicit `(k, i)`.
pub fn py12_state(k: &BitVec, i: &BitVec) -> Result<TwoBranchState> {
    if !k.is_odd() {
        return Err(Error::Parameter(format!("k = {k} does not have odd weight")));
    }
    TwoBranchState::plain(i.clone(), i.xor(k)?)
}

pub fn py12_issue(key: &Py12Key) -> Result<TwoBranchState> {
    py12_state(&key.k, &key.i)
}

pub fn py12_encrypt(state: &TwoBranchState, bit: bool) -> Result<TwoBranchState> {
    if !state.is_undressed() {
        return Err(Error::UnsupportedState("encryption needs an undressed state"));
    }
    if bit {
        state.apply_z_all()
    } else {
        Ok(state.clone())
    }
}

/// Symbolic decryption for an explicit `(k, i)`.
pub fn py12_decrypt_with(k: &BitVec, i: &BitVec, ct: &TwoBranchState) -> Result<bool> {
    check_len(k.len(), ct.qubits())?;
    if !ct.is_undressed() {
        return Err(Error::CiphertextMismatch);
    }
    let shifted = ct.apply_x_mask(i)?;
    match shifted.relative_phase_of(&BitVec::zeros(k.len()), k) {
        Some(PhasePower::ONE) => Ok(false),
        Some(PhasePower::MINUS_ONE) => Ok(true),
        _ => Err(Error::CiphertextMismatch),
    }
}

pub fn py12_decrypt(key: &Py12Key, ct: &TwoBranchState) -> Result<bool> {
    py12_decrypt_with(&key.k, &key.i, ct)
}

/// `X^i`, then CNOTs from the pivot of `k` to its other set bits. Returns
/// `None` for the pivot when `k` is zero.
pub fn py12_decryption_circuit(k: &BitVec, i: &BitVec) -> Result<(Circuit, Option<usize>)> {
    check_len(k.len(), i.len())?;
    let mut c = Circuit::default();
    for q in i.ones_positions() {
        c.push(Gate::Pauli(Pauli::X, q));
    }
    let pivot = k.first_one();
    if let Some(j) = pivot {
        for q in k.ones_positions().filter(|&q| q != j) {
            c.push(Gate::Cnot { control: j, target: q });
        }
    }
    Ok((c, pivot))
}

/// Runs the decryption circuit for `(k, i)` on `ct` and samples the `±`
/// measurement on the pivot (`+` ↦ 0). Works for any candidate `k`, which is
/// what the guessing adversary needs; a zero `k` decodes as a fair coin.
pub fn py12_decrypt_dense_sampled<R: Rng + ?Sized>(
    k: &BitVec,
    i: &BitVec,
    ct: &DenseState,
    rng: &mut R,
) -> Result<bool> {
    let (prob_minus, _) = py12_dense_outcome(k, i, ct)?;
    Ok(match prob_minus {
        Some(p) => rng.gen::<f64>() < p,
        None => rng.gen::<bool>(),
    })
}

/// Probability of reading `−` at the pivot, or `None` when `k` is zero.
/// The second value is the post-circuit state.
pub fn py12_dense_outcome(k: &BitVec, i: &BitVec, ct: &DenseState) -> Result<(Option<f64>, DenseState)> {
    check_len(k.len(), ct.qubits())?;
    let (circuit, pivot) = py12_decryption_circuit(k, i)?;
    let mut psi = ct.clone();
    circuit.apply(&mut psi)?;
    let prob = match pivot {
        Some(j) => Some(psi.measure_pm(j)?.prob_minus),
        None => None,
    };
    Ok((prob, psi))
}
