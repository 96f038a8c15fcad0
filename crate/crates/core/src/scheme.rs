//! The bit-oriented public-key scheme: key generation, public-key issuance,
//! one-bit encryption and decryption.
//!
//! A private key is three Boolean functions `F1, F2, F3 : {0,1}^m → {0,1}^n`.
//! A public key is a fresh tag `(s1, s2, s3)` together with
//! `Y^{k3} H^{k2} (|0⟩ + |k1⟩)/√2`, where `k_i = F_i(s_i)` and `k1` has odd
//! weight. Bit 1 is encrypted by `Y^{⊗n}`, which turns the undressed state
//! into `±(|1ⁿ⟩ − |k̄1⟩)/√2`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::bits::BitVec;
use crate::boolfunc::{parse_triple, BooleanFunction};
use crate::error::{check_len, Error, Result};
use crate::qsim::{check_capacity, Circuit, DenseState, Gate, Pauli, PhasePower, TwoBranchState, DENSE_LIMIT};
use crate::registry::Registry;

/// Random draws of `s1` before falling back to enumerating the domain.
const QUICK_DRAWS: usize = 64;
/// Upper bound on `s1` draws when the domain is too large to enumerate.
const MAX_DRAWS: usize = 1 << 20;
const MAX_ENUMERABLE_INPUTS: usize = 20;

/// The classical part of a public key.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tag {
    pub s1: BitVec,
    pub s2: BitVec,
    pub s3: BitVec,
}

/// The evaluated key material `(k1, k2, k3)` for one tag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KeyTriple {
    pub k1: BitVec,
    pub k2: BitVec,
    pub k3: BitVec,
}

impl KeyTriple {
    pub fn new(k1: BitVec, k2: BitVec, k3: BitVec) -> Result<Self> {
        check_len(k1.len(), k2.len())?;
        check_len(k1.len(), k3.len())?;
        Ok(Self { k1, k2, k3 })
    }

    /// Uniform `k1 ∈ Ω_n` and uniform masks.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self {
            k1: BitVec::random_odd(n, rng),
            k2: BitVec::random(n, rng),
            k3: BitVec::random(n, rng),
        }
    }

    pub fn qubits(&self) -> usize {
        self.k1.len()
    }

    /// Lowest position where `k1` is set.
    pub fn pivot(&self) -> Option<usize> {
        self.k1.first_one()
    }
}

/// Opaque identifier of an issued public key.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeyId(String);

impl KeyId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() || !id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_') {
            return Err(Error::Parse(format!("invalid key id {id:?}")));
        }
        Ok(Self(id))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self(format!("{:016x}", rng.gen::<u64>()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for KeyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrivateKey {
    n: usize,
    m: usize,
    p: usize,
    f1: BooleanFunction,
    f2: BooleanFunction,
    f3: BooleanFunction,
}

impl PrivateKey {
    /// Samples `F1`, `F2`, `F3` in that order from `rng`.
    pub fn generate<R: Rng + ?Sized>(n: usize, m: usize, p: usize, rng: &mut R) -> Result<Self> {
        check_params(n, m, p)?;
        let f1 = BooleanFunction::sample(m, n, p, rng)?;
        let f2 = BooleanFunction::sample(m, n, p, rng)?;
        let f3 = BooleanFunction::sample(m, n, p, rng)?;
        Ok(Self { n, m, p, f1, f2, f3 })
    }

    pub fn from_functions(f1: BooleanFunction, f2: BooleanFunction, f3: BooleanFunction) -> Result<Self> {
        let (m, n, p) = (f1.inputs(), f1.outputs(), f1.terms_per_output());
        for f in [&f2, &f3] {
            if (f.inputs(), f.outputs(), f.terms_per_output()) != (m, n, p) {
                return Err(Error::Parameter("all three functions must share (m, n, p)".into()));
            }
        }
        check_params(n, m, p)?;
        Ok(Self { n, m, p, f1, f2, f3 })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn inputs(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> usize {
        self.p
    }

    pub fn functions(&self) -> [&BooleanFunction; 3] {
        [&self.f1, &self.f2, &self.f3]
    }

    pub fn derive(&self, tag: &Tag) -> Result<KeyTriple> {
        Ok(KeyTriple {
            k1: self.f1.eval(&tag.s1)?,
            k2: self.f2.eval(&tag.s2)?,
            k3: self.f3.eval(&tag.s3)?,
        })
    }
}

fn check_params(n: usize, m: usize, p: usize) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Parameter(format!("n must be even and at least 2, got {n}")));
    }
    if m == 0 || p == 0 {
        return Err(Error::Parameter("m and p must be at least 1".into()));
    }
    Ok(())
}

impl fmt::Display for PrivateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.n, self.m, self.p)?;
        for func in self.functions() {
            write!(f, "{func}")?;
        }
        Ok(())
    }
}

impl FromStr for PrivateKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let (n, m, p) = parse_triple(lines.next().ok_or_else(|| Error::Parse("empty private key".into()))?)?;
        let f1 = BooleanFunction::parse_lines(&mut lines)?;
        let f2 = BooleanFunction::parse_lines(&mut lines)?;
        let f3 = BooleanFunction::parse_lines(&mut lines)?;
        if lines.next().is_some() {
            return Err(Error::Parse("trailing content after private key".into()));
        }
        let key = Self::from_functions(f1, f2, f3)?;
        if (key.n, key.m, key.p) != (n, m, p) {
            return Err(Error::Parse("private key header disagrees with its functions".into()));
        }
        Ok(key)
    }
}

/// Tag plus quantum state, as stored in the registry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    pub key_id: KeyId,
    pub tag: Tag,
    pub state: TwoBranchState,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    pub key_id: KeyId,
    pub tag: Tag,
    pub state: TwoBranchState,
}

/// `Y^{k3} H^{k2} (|0⟩ + |k1⟩)/√2`.
pub fn public_state(k: &KeyTriple) -> Result<TwoBranchState> {
    if !k.k1.is_odd() {
        return Err(Error::Parameter(format!("k1 = {} does not have odd weight", k.k1)));
    }
    TwoBranchState::plain(BitVec::zeros(k.qubits()), k.k1.clone())?.with_masks(k.k2.clone(), k.k3.clone())
}

/// Draws a fresh tag with odd-weight `k1` and builds the public key.
pub fn issue_public_key<R: Rng + ?Sized>(sk: &PrivateKey, rng: &mut R) -> Result<PublicKey> {
    let s2 = BitVec::random(sk.m, rng);
    let s3 = BitVec::random(sk.m, rng);
    let s1 = draw_s1(&sk.f1, rng)?;
    let tag = Tag { s1, s2, s3 };
    let k = sk.derive(&tag)?;
    Ok(PublicKey {
        key_id: KeyId::random(rng),
        state: public_state(&k)?,
        tag,
    })
}

pub(crate) fn draw_s1<R: Rng + ?Sized>(f1: &BooleanFunction, rng: &mut R) -> Result<BitVec> {
    let m = f1.inputs();
    let odd = |s: &BitVec| f1.eval(s).map(|k| k.is_odd());
    for _ in 0..QUICK_DRAWS {
        let s = BitVec::random(m, rng);
        if odd(&s)? {
            return Ok(s);
        }
    }
    if m <= MAX_ENUMERABLE_INPUTS {
        // uniform over the valid set, the same law rejection sampling has
        let valid: Vec<usize> = (0..1usize << m)
            .filter(|&x| odd(&BitVec::from_index(x, m)).unwrap_or(false))
            .collect();
        if valid.is_empty() {
            return Err(Error::NoValidK1);
        }
        return Ok(BitVec::from_index(valid[rng.gen_range(0..valid.len())], m));
    }
    for _ in QUICK_DRAWS..MAX_DRAWS {
        let s = BitVec::random(m, rng);
        if odd(&s)? {
            return Ok(s);
        }
    }
    Err(Error::NoValidK1)
}

/// Bit 0 leaves the state alone; bit 1 applies `Y^{⊗n}`.
pub fn encrypt_state(state: &TwoBranchState, bit: bool) -> TwoBranchState {
    if bit {
        state.apply_y_all()
    } else {
        state.clone()
    }
}

/// Consumes `pk` in `registry` and encrypts one bit with it.
pub fn encrypt(pk: &PublicKey, bit: bool, registry: &impl Registry) -> Result<Ciphertext> {
    registry.consume(&pk.key_id)?;
    Ok(Ciphertext {
        key_id: pk.key_id.clone(),
        tag: pk.tag.clone(),
        state: encrypt_state(&pk.state, bit),
    })
}

/// Removes the dressing and reads the bit from the branch pair: `{0ⁿ, k1}`
/// in phase is 0, `{1ⁿ, k̄1}` out of phase is 1.
pub fn decrypt_state(k: &KeyTriple, state: &TwoBranchState) -> Result<bool> {
    check_len(k.qubits(), state.qubits())?;
    let inner = state.undo_dressing(&k.k2, &k.k3)?;
    let n = k.qubits();
    if inner.relative_phase_of(&BitVec::zeros(n), &k.k1) == Some(PhasePower::ONE) {
        return Ok(false);
    }
    if inner.relative_phase_of(&BitVec::ones(n), &k.k1.complement()) == Some(PhasePower::MINUS_ONE) {
        return Ok(true);
    }
    Err(Error::CiphertextMismatch)
}

pub fn decrypt(sk: &PrivateKey, ct: &Ciphertext) -> Result<bool> {
    decrypt_state(&sk.derive(&ct.tag)?, &ct.state)
}

/// Gate list that undoes the dressing and collapses the branch pair onto the
/// pivot qubit: `Y^{k3}`, then `H^{k2}`, then CNOTs from the pivot to every
/// other set position of `k1`.
pub fn decryption_circuit(k: &KeyTriple) -> Result<(Circuit, usize)> {
    let pivot = k.pivot().ok_or_else(|| Error::Parameter("k1 is zero".into()))?;
    let mut c = Circuit::default();
    for q in k.k3.ones_positions() {
        c.push(Gate::Pauli(Pauli::Y, q));
    }
    for q in k.k2.ones_positions() {
        c.push(Gate::H(q));
    }
    for q in k.k1.ones_positions().filter(|&q| q != pivot) {
        c.push(Gate::Cnot { control: pivot, target: q });
    }
    Ok((c, pivot))
}

/// Runs the decryption circuit on a dense ciphertext and measures the pivot
/// in the `{|+⟩, |−⟩}` basis. Returns the likelier outcome (`+` ↦ 0) and its
/// probability.
pub fn decrypt_dense_with(k: &KeyTriple, ct: &DenseState) -> Result<(bool, f64)> {
    check_len(k.qubits(), ct.qubits())?;
    let (circuit, pivot) = decryption_circuit(k)?;
    let mut psi = ct.clone();
    circuit.apply(&mut psi)?;
    let out = psi.measure_pm(pivot)?;
    if out.prob_minus > out.prob_plus {
        Ok((true, out.prob_minus))
    } else {
        Ok((false, out.prob_plus))
    }
}

pub fn decrypt_dense(sk: &PrivateKey, ct: &DenseState, tag: &Tag) -> Result<(bool, f64)> {
    check_capacity(ct.qubits(), DENSE_LIMIT)?;
    decrypt_dense_with(&sk.derive(tag)?, ct)
}

/// State-preparation circuit for `(|0⟩ + |k1⟩)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrepMethod {
    /// Control register plus controlled-`k` fan-out, then a CNOT from a set
    /// bit of `k` back onto the control to disentangle it. Uses `n + 1`
    /// qubits with the control at index 0.
    Ancilla,
    /// Hadamard on the pivot qubit, then CNOTs from the pivot to the other
    /// set bits.
    Pivot,
}

/// Returns the circuit and the number of qubits it acts on.
pub fn preparation_circuit(k1: &BitVec, method: PrepMethod) -> Result<(Circuit, usize)> {
    if !k1.is_odd() {
        return Err(Error::Parameter(format!("k1 = {k1} does not have odd weight")));
    }
    let pivot = k1.first_one().expect("odd weight implies a set bit");
    let mut c = Circuit::default();
    match method {
        PrepMethod::Ancilla => {
            c.push(Gate::H(0));
            for q in k1.ones_positions() {
                c.push(Gate::Cnot { control: 0, target: q + 1 });
            }
            c.push(Gate::Cnot { control: pivot + 1, target: 0 });
            Ok((c, k1.len() + 1))
        }
        PrepMethod::Pivot => {
            c.push(Gate::H(pivot));
            for q in k1.ones_positions().filter(|&q| q != pivot) {
                c.push(Gate::Cnot { control: pivot, target: q });
            }
            Ok((c, k1.len()))
        }
    }
}

pub fn prepare_base_state(k1: &BitVec, method: PrepMethod) -> Result<DenseState> {
    let n = k1.len();
    check_capacity(n, DENSE_LIMIT)?;
    let (circuit, qubits) = preparation_circuit(k1, method)?;
    let mut psi = DenseState::zero_with_limit(qubits, DENSE_LIMIT + 1)?;
    circuit.apply(&mut psi)?;
    if qubits == n {
        return Ok(psi);
    }
    // the control qubit is the most significant bit; it must end in |0⟩
    let half = 1usize << n;
    let (keep, rest) = psi.amplitudes().split_at(half);
    let leak: f64 = rest.iter().map(|a| a.norm_sqr()).sum();
    if leak > 1e-12 {
        return Err(Error::UnsupportedState("control register left entangled"));
    }
    DenseState::from_amplitudes(n, keep.to_vec())
}

fn write_tag(f: &mut fmt::Formatter<'_>, key_id: &KeyId, tag: &Tag, state: &TwoBranchState) -> fmt::Result {
    writeln!(f, "key_id={key_id}")?;
    writeln!(f, "s1={}", tag.s1)?;
    writeln!(f, "s2={}", tag.s2)?;
    writeln!(f, "s3={}", tag.s3)?;
    writeln!(f, "state={state}")
}

fn parse_tagged(s: &str) -> Result<(KeyId, Tag, TwoBranchState)> {
    let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
    let mut field = |key: &str| -> Result<&str> {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {key} line")))?;
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| Error::Parse(format!("expected {key}=…, got {line:?}")))
    };
    let key_id = KeyId::new(field("key_id")?)?;
    let s1 = field("s1")?.parse()?;
    let s2 = field("s2")?.parse()?;
    let s3 = field("s3")?.parse()?;
    let state = field("state")?.parse()?;
    if lines.next().is_some() {
        return Err(Error::Parse("trailing content".into()));
    }
    Ok((key_id, Tag { s1, s2, s3 }, state))
}

impl fmt::Display for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tag(f, &self.key_id, &self.tag, &self.state)
    }
}

impl FromStr for PublicKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (key_id, tag, state) = parse_tagged(s)?;
        Ok(Self { key_id, tag, state })
    }
}

impl fmt::Display for Ciphertext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tag(f, &self.key_id, &self.tag, &self.state)
    }
}

impl FromStr for Ciphertext {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (key_id, tag, state) = parse_tagged(s)?;
        Ok(Self { key_id, tag, state })
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::boolfunc::Monomial;
    use crate::qsim::DensityMatrix;
    use crate::registry::MemoryRegistry;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    fn all(n: usize) -> impl Iterator<Item = BitVec> {
        (0..1usize << n).map(move |i| BitVec::from_index(i, n))
    }

    #[test]
    fn keygen_is_reproducible_and_rejects_odd_n() {
        let a = PrivateKey::generate(4, 4, 2, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = PrivateKey::generate(4, 4, 2, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            PrivateKey::generate(3, 4, 2, &mut ChaCha8Rng::seed_from_u64(1)),
            Err(Error::Parameter(_))
        ));
        assert!(PrivateKey::generate(4, 0, 2, &mut ChaCha8Rng::seed_from_u64(1)).is_err());
    }

    #[test]
    fn distinct_seeds_give_distinct_keys() {
        let keys: HashSet<String> = (0..100)
            .map(|seed| PrivateKey::generate(4, 4, 2, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap().to_string())
            .collect();
        assert_eq!(keys.len(), 100);
    }

    #[test]
    fn private_key_text_round_trip() {
        let sk = PrivateKey::generate(4, 3, 2, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let text = sk.to_string();
        assert!(text.starts_with("4 3 2\n3 4 2\n"));
        assert_eq!(text.parse::<PrivateKey>().unwrap(), sk);
    }

    #[test]
    fn degenerate_f1_cannot_issue() {
        // every output is 1 ⊕ 1 = 0, so k1 is always the zero vector
        let zero = BooleanFunction::new(2, 4, 2, vec![vec![Monomial::new(bv("00")); 2]; 4]).unwrap();
        let other = BooleanFunction::sample(2, 4, 2, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let sk = PrivateKey::from_functions(zero, other.clone(), other).unwrap();
        assert!(matches!(
            issue_public_key(&sk, &mut ChaCha8Rng::seed_from_u64(0)),
            Err(Error::NoValidK1)
        ));
    }

    #[test]
    fn issued_state_matches_dense_dressing() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let sk = PrivateKey::generate(4, 4, 4, &mut rng).unwrap();
        for _ in 0..20 {
            let pk = issue_public_key(&sk, &mut rng).unwrap();
            let k = sk.derive(&pk.tag).unwrap();
            assert!(k.k1.is_odd());
            assert!(pk.state.u().is_zero());
            assert_eq!(pk.state.v(), &k.k1);
            let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 16];
            amps[0] = num_complex::Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            amps[k.k1.to_index()] = amps[0];
            let expected = DenseState::from_amplitudes(4, amps)
                .unwrap()
                .apply_hadamard_mask(&k.k2)
                .unwrap()
                .apply_pauli_mask(Pauli::Y, &k.k3)
                .unwrap();
            assert!(pk.state.expand().unwrap().max_abs_diff(&expected) < 1e-12);
        }
    }

    #[test]
    fn issuance_is_fresh() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sk = PrivateKey::generate(4, 6, 4, &mut rng).unwrap();
        let keys: Vec<PublicKey> = (0..100).map(|_| issue_public_key(&sk, &mut rng).unwrap()).collect();
        let ids: HashSet<&KeyId> = keys.iter().map(|k| &k.key_id).collect();
        assert_eq!(ids.len(), 100);
        let tags: HashSet<&Tag> = keys.iter().map(|k| &k.tag).collect();
        assert!(tags.len() > 50);
    }

    #[test]
    fn preparation_methods_agree() {
        let k = bv("01");
        let b = prepare_base_state(&k, PrepMethod::Pivot).unwrap();
        let expect = TwoBranchState::plain(bv("00"), k.clone()).unwrap().expand().unwrap();
        assert!(b.max_abs_diff(&expect) < 1e-15);

        let k = bv("0111");
        let a = prepare_base_state(&k, PrepMethod::Ancilla).unwrap();
        let b = prepare_base_state(&k, PrepMethod::Pivot).unwrap();
        assert!(a.phase_aligned_diff(&b) < 1e-12);
        let (ca, _) = preparation_circuit(&k, PrepMethod::Ancilla).unwrap();
        let (cb, _) = preparation_circuit(&k, PrepMethod::Pivot).unwrap();
        assert_eq!(cb.cnot_count(), 2);
        assert_eq!(ca.cnot_count(), cb.cnot_count() + 2);
        assert_eq!((ca.hadamard_count(), cb.hadamard_count()), (1, 1));
        assert!(prepare_base_state(&bv("0110"), PrepMethod::Pivot).is_err());
        assert!(prepare_base_state(&bv("0000"), PrepMethod::Ancilla).is_err());
    }

    #[test]
    fn encrypt_examples() {
        let reg = MemoryRegistry::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sk = PrivateKey::generate(4, 4, 4, &mut rng).unwrap();
        let pk = issue_public_key(&sk, &mut rng).unwrap();
        reg.register(&pk).unwrap();
        let ct = encrypt(&pk, false, &reg).unwrap();
        assert_eq!(ct.state, pk.state);
        assert!(matches!(encrypt(&pk, true, &reg), Err(Error::KeyConsumed(_))));
    }

    #[test]
    fn bit_one_closed_form() {
        let k = KeyTriple::new(bv("0111"), bv("0000"), bv("0000")).unwrap();
        let ct = encrypt_state(&public_state(&k).unwrap(), true);
        let expected = TwoBranchState::new(bv("1111"), bv("1000"), PhasePower::MINUS_ONE, PhasePower::ONE, bv("0000"), bv("0000"))
            .unwrap()
            .expand()
            .unwrap();
        let got = ct.expand().unwrap();
        assert!(got.phase_aligned_diff(&expected) < 1e-12);
        assert!(DensityMatrix::from_pure(&got).max_abs_diff(&DensityMatrix::from_pure(&expected)) < 1e-12);
    }

    #[test]
    fn exhaustive_round_trip_n4() {
        for k1 in all(4).filter(BitVec::is_odd) {
            for k2 in all(4) {
                for k3 in all(4) {
                    let k = KeyTriple::new(k1.clone(), k2.clone(), k3.clone()).unwrap();
                    let pk = public_state(&k).unwrap();
                    for bit in [false, true] {
                        assert_eq!(decrypt_state(&k, &encrypt_state(&pk, bit)).unwrap(), bit);
                    }
                }
            }
        }
    }

    #[test]
    fn tampered_ciphertext_is_rejected() {
        let k = KeyTriple::new(bv("0111"), bv("1010"), bv("0011")).unwrap();
        let ct = encrypt_state(&public_state(&k).unwrap(), true);
        let mut y = ct.y_mask().clone();
        y.flip(2);
        let tampered = ct.clone().with_masks(ct.h_mask().clone(), y).unwrap();
        assert!(matches!(decrypt_state(&k, &tampered), Err(Error::CiphertextMismatch)));
    }

    #[test]
    fn dense_decryption_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..30 {
            let k = KeyTriple::random(4, &mut rng);
            let pk = public_state(&k).unwrap();
            for bit in [false, true] {
                let (got, prob) = decrypt_dense_with(&k, &encrypt_state(&pk, bit).expand().unwrap()).unwrap();
                assert_eq!(got, bit);
                assert!(prob >= 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn text_forms_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let sk = PrivateKey::generate(6, 5, 3, &mut rng).unwrap();
        let pk = issue_public_key(&sk, &mut rng).unwrap();
        assert_eq!(pk.to_string().parse::<PublicKey>().unwrap(), pk);
        let ct = Ciphertext { key_id: pk.key_id.clone(), tag: pk.tag.clone(), state: pk.state.apply_y_all() };
        let back: Ciphertext = ct.to_string().parse().unwrap();
        assert_eq!(back, ct);
        assert!(decrypt(&sk, &back).unwrap());
    }
}
