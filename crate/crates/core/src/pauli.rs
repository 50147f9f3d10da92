//! Pauli strings, sets of Pauli strings and sparse Pauli expansions.
//!
//! A string on `n` qubits packs its letters two bits each (I=0, X=1, Y=2,
//! Z=3) into a `u64`, qubit 0 in the most significant pair. The packed word
//! is the string's [`PauliString::index`] into a dense `4^n` coefficient
//! vector, which is also the output order of the Bell transform.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::state::operator::check_dense_limit;
use crate::state::{choi, DenseOperator};
use crate::{QsqError, Result, C64};

/// Longest string the packed representation holds.
pub const MAX_PAULI_QUBITS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(bits: u64) -> Self {
        Self::ALL[(bits & 3) as usize]
    }

    pub fn bits(self) -> u64 {
        self as u64
    }

    pub fn as_char(self) -> char {
        ['I', 'X', 'Y', 'Z'][self as usize]
    }

    /// The 2×2 matrix.
    pub fn matrix(self) -> DMatrix<C64> {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let entries = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        DMatrix::from_row_slice(2, 2, &entries)
    }
}

impl TryFrom<char> for Pauli {
    type Error = QsqError;

    fn try_from(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            _ => Err(QsqError::InvalidPauli(c.to_string())),
        }
    }
}

fn check_pauli_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PAULI_QUBITS {
        return Err(QsqError::InvalidPauli(format!("qubit count {n} outside 1..={MAX_PAULI_QUBITS}")));
    }
    Ok(())
}

/// A tensor product of single-qubit Paulis, without phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: u8,
    bits: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_PAULI_QUBITS);
        Self { n: n as u8, bits: 0 }
    }

    /// The string whose [`index`](Self::index) is `index`.
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(n <= MAX_PAULI_QUBITS);
        debug_assert!(n == MAX_PAULI_QUBITS || index < 1u64 << (2 * n));
        Self { n: n as u8, bits: index }
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        assert!(letters.len() <= MAX_PAULI_QUBITS);
        let bits = letters.iter().fold(0u64, |acc, l| (acc << 2) | l.bits());
        Self { n: letters.len() as u8, bits }
    }

    /// Single letter `p` on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        Self::identity(n).with_letter(q, p)
    }

    /// All `4^n` strings in index order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        (0..1u64 << (2 * n)).map(move |i| Self::from_index(n, i))
    }

    pub fn num_qubits(&self) -> usize {
        self.n as usize
    }

    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    fn shift(&self, q: usize) -> usize {
        2 * (self.num_qubits() - 1 - q)
    }

    pub fn letter(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.bits >> self.shift(q))
    }

    pub fn with_letter(mut self, q: usize, p: Pauli) -> Self {
        assert!(q < self.num_qubits());
        let s = self.shift(q);
        self.bits = (self.bits & !(3 << s)) | (p.bits() << s);
        self
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.num_qubits()).map(|q| self.letter(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.bits == 0
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num_qubits()).filter(|&q| self.letter(q) != Pauli::I).collect()
    }

    pub fn weight(&self) -> usize {
        self.support().len()
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        assert!(self.num_qubits() + other.num_qubits() <= MAX_PAULI_QUBITS);
        Self { n: self.n + other.n, bits: (self.bits << (2 * other.num_qubits())) | other.bits }
    }

    /// Basis-index masks `(x, z)`: bit `n−1−q` of `x` is set when the letter
    /// on `q` flips the bit (X, Y), of `z` when it applies a sign (Y, Z).
    pub fn xz_masks(&self) -> (usize, usize) {
        let n = self.num_qubits();
        let mut x = 0;
        let mut z = 0;
        for q in 0..n {
            let b = 1usize << (n - 1 - q);
            match self.letter(q) {
                Pauli::I => {}
                Pauli::X => x |= b,
                Pauli::Y => {
                    x |= b;
                    z |= b;
                }
                Pauli::Z => z |= b,
            }
        }
        (x, z)
    }

    fn y_count(&self) -> u32 {
        (0..self.num_qubits()).filter(|&q| self.letter(q) == Pauli::Y).count() as u32
    }

    /// `P|b⟩ = phase·|target⟩`.
    pub fn act_on_basis(&self, b: usize) -> (C64, usize) {
        let (x, z) = self.xz_masks();
        let sign = if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        let phase = match self.y_count() % 4 {
            0 => C64::new(sign, 0.0),
            1 => C64::new(0.0, sign),
            2 => C64::new(-sign, 0.0),
            _ => C64::new(0.0, -sign),
        };
        (phase, b ^ x)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QsqError;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s.chars().map(Pauli::try_from).collect::<Result<Vec<_>>>()?;
        check_pauli_qubits(letters.len())?;
        Ok(Self::from_letters(&letters))
    }
}

/// The `2^n × 2^n` matrix of a Pauli string.
pub fn pauli_matrix(p: &PauliString) -> Result<DenseOperator> {
    check_dense_limit(p.num_qubits())?;
    let d = 1usize << p.num_qubits();
    let mut m = DMatrix::<C64>::zeros(d, d);
    for col in 0..d {
        let (phase, row) = p.act_on_basis(col);
        m[(row, col)] = phase;
    }
    DenseOperator::new(m)
}

/// Strings whose first `k` letters are fixed, the rest free.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliPrefix {
    n: usize,
    fixed: Vec<Pauli>,
}

impl PauliPrefix {
    pub fn new(n: usize, fixed: Vec<Pauli>) -> Result<Self> {
        check_pauli_qubits(n)?;
        if fixed.len() > n {
            return Err(QsqError::DimensionMismatch { expected: n, found: fixed.len() });
        }
        Ok(Self { n, fixed })
    }

    /// The empty prefix: every string on `n` qubits.
    pub fn all(n: usize) -> Self {
        Self { n, fixed: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn fixed(&self) -> &[Pauli] {
        &self.fixed
    }

    pub fn len_fixed(&self) -> usize {
        self.fixed.len()
    }

    /// One more fixed letter.
    pub fn extend(&self, p: Pauli) -> Self {
        assert!(self.fixed.len() < self.n, "prefix already complete");
        let mut fixed = self.fixed.clone();
        fixed.push(p);
        Self { n: self.n, fixed }
    }

    /// The single string a complete prefix denotes.
    pub fn to_string_if_complete(&self) -> Option<PauliString> {
        (self.fixed.len() == self.n).then(|| PauliString::from_letters(&self.fixed))
    }

    /// Half-open index range `[start, start + 4^(n−k))`.
    pub fn index_range(&self) -> std::ops::Range<usize> {
        let free = 2 * (self.n - self.fixed.len());
        let head = self.fixed.iter().fold(0usize, |acc, l| (acc << 2) | l.bits() as usize);
        let start = head << free;
        start..start + (1usize << free)
    }

    pub fn size(&self) -> usize {
        1usize << (2 * (self.n - self.fixed.len()))
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        p.num_qubits() == self.n && self.fixed.iter().enumerate().all(|(q, &l)| p.letter(q) == l)
    }
}

impl fmt::Display for PauliPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.fixed {
            write!(f, "{}", l.as_char())?;
        }
        for _ in self.fixed.len()..self.n {
            write!(f, "*")?;
        }
        Ok(())
    }
}

/// Strings with prescribed letters on an arbitrary subset of qubits.
///
/// Membership is `bits & mask == value`, both in packed letter layout.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliPattern {
    n: usize,
    mask: u64,
    value: u64,
}

impl PauliPattern {
    /// Letter `letters[i]` required on qubit `qubits[i]`.
    pub fn new(n: usize, constraints: &[(usize, Pauli)]) -> Result<Self> {
        check_pauli_qubits(n)?;
        let mut mask = 0u64;
        let mut value = 0u64;
        for &(q, l) in constraints {
            if q >= n {
                return Err(QsqError::QubitOutOfRange { index: q, n });
            }
            let s = 2 * (n - 1 - q);
            mask |= 3 << s;
            value = (value & !(3 << s)) | (l.bits() << s);
        }
        Ok(Self { n, mask, value })
    }

    /// `{P : P_q = I for q ∈ qubits}`.
    pub fn identity_on(n: usize, qubits: &[usize]) -> Result<Self> {
        let c: Vec<(usize, Pauli)> = qubits.iter().map(|&q| (q, Pauli::I)).collect();
        Self::new(n, &c)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        p.num_qubits() == self.n && p.bits() & self.mask == self.value
    }

    pub fn size(&self) -> usize {
        1usize << (2 * self.n - self.mask.count_ones() as usize)
    }
}

impl fmt::Display for PauliPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            let s = 2 * (self.n - 1 - q);
            if (self.mask >> s) & 3 == 3 {
                write!(f, "{}", Pauli::from_bits(self.value >> s).as_char())?;
            } else {
                write!(f, "*")?;
            }
        }
        Ok(())
    }
}

/// A set of Pauli strings a subset-mass measurement projects onto.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PauliSet {
    Prefix(PauliPrefix),
    Pattern(PauliPattern),
    Strings(Vec<PauliString>),
}

impl PauliSet {
    pub fn singleton(p: PauliString) -> Self {
        PauliSet::Strings(vec![p])
    }

    /// Qubit count, `None` for an empty explicit list.
    pub fn num_qubits(&self) -> Option<usize> {
        match self {
            PauliSet::Prefix(p) => Some(p.num_qubits()),
            PauliSet::Pattern(p) => Some(p.num_qubits()),
            PauliSet::Strings(s) => s.first().map(PauliString::num_qubits),
        }
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        match self {
            PauliSet::Prefix(x) => x.contains(p),
            PauliSet::Pattern(x) => x.contains(p),
            PauliSet::Strings(s) => s.contains(p),
        }
    }

    /// Explicit lists must be duplicate-free for the set to define a projector.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            PauliSet::Strings(s) => {
                let mut seen = std::collections::HashSet::new();
                for p in s {
                    if p.num_qubits() != n {
                        return Err(QsqError::DimensionMismatch { expected: n, found: p.num_qubits() });
                    }
                    if !seen.insert(*p) {
                        return Err(QsqError::InvalidPauli(format!("duplicate string {p} in set")));
                    }
                }
                Ok(())
            }
            _ => match self.num_qubits() {
                Some(m) if m != n => Err(QsqError::DimensionMismatch { expected: n, found: m }),
                _ => Ok(()),
            },
        }
    }

    /// `Σ_{P ∈ set} |coeffs[P]|²` over a dense coefficient vector. A prefix
    /// is one contiguous block.
    pub fn mass(&self, coeffs: &[C64]) -> f64 {
        match self {
            PauliSet::Prefix(x) => coeffs[x.index_range()].iter().map(C64::norm_sqr).sum(),
            PauliSet::Pattern(x) => coeffs
                .iter()
                .enumerate()
                .filter(|(i, _)| (*i as u64) & x.mask() == x.value())
                .map(|(_, c)| c.norm_sqr())
                .sum(),
            PauliSet::Strings(s) => s.iter().map(|p| coeffs[p.index()].norm_sqr()).sum(),
        }
    }

    /// Members in index order (explicit lists keep their order).
    pub fn members(&self, n: usize) -> Vec<PauliString> {
        match self {
            PauliSet::Strings(s) => s.clone(),
            _ => PauliString::all(n).filter(|p| self.contains(p)).collect(),
        }
    }
}

impl fmt::Display for PauliSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PauliSet::Prefix(p) => write!(f, "prefix:{p}"),
            PauliSet::Pattern(p) => write!(f, "pattern:{p}"),
            PauliSet::Strings(s) => {
                write!(f, "set:{{")?;
                for (i, p) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

impl From<PauliPrefix> for PauliSet {
    fn from(p: PauliPrefix) -> Self {
        PauliSet::Prefix(p)
    }
}

impl From<PauliPattern> for PauliSet {
    fn from(p: PauliPattern) -> Self {
        PauliSet::Pattern(p)
    }
}

/// Sparse map from Pauli string to coefficient, ordered by index.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PauliExpansion {
    n: usize,
    coeffs: BTreeMap<PauliString, C64>,
}

impl PauliExpansion {
    pub fn new(n: usize) -> Self {
        Self { n, coeffs: BTreeMap::new() }
    }

    /// Keep entries of a dense `4^n` vector with modulus above `cutoff`.
    pub fn from_dense(n: usize, coeffs: &[C64], cutoff: f64) -> Self {
        let coeffs = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > cutoff)
            .map(|(i, c)| (PauliString::from_index(n, i as u64), *c))
            .collect();
        Self { n, coeffs }
    }

    /// Coefficients `Tr[P A] / 2^n` of an operator.
    pub fn from_operator(a: &DenseOperator, cutoff: f64) -> Self {
        let n = a.qubits();
        let v = choi::choi_of_operator(a);
        Self::from_dense(n, &choi::bell_transform(&v), cutoff)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, p: PauliString, c: C64) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(QsqError::DimensionMismatch { expected: self.n, found: p.num_qubits() });
        }
        self.coeffs.insert(p, c);
        Ok(())
    }

    pub fn get(&self, p: &PauliString) -> C64 {
        self.coeffs.get(p).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &C64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Σ_P |c_P|²`
    pub fn mass(&self) -> f64 {
        self.coeffs.values().map(C64::norm_sqr).sum()
    }

    pub fn negated(&self) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|(p, c)| (*p, -c)).collect() }
    }

    /// `Σ_P c_P P` as a dense matrix.
    pub fn to_operator(&self) -> Result<DenseOperator> {
        check_dense_limit(self.n)?;
        let d = 1usize << self.n;
        let mut m = DMatrix::<C64>::zeros(d, d);
        for (p, c) in &self.coeffs {
            for col in 0..d {
                let (phase, row) = p.act_on_basis(col);
                m[(row, col)] += phase * c;
            }
        }
        DenseOperator::new(m)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(QsqError::QubitOutOfRange { index: q, n: self.n });
        }
        Ok(())
    }
}

/// `Σ |c_P|²` over strings whose support meets `subset`.
pub fn influence_subset_mass(expansion: &PauliExpansion, subset: &[usize]) -> Result<f64> {
    for &q in subset {
        expansion.check_qubit(q)?;
    }
    Ok(expansion
        .iter()
        .filter(|(p, _)| subset.iter().any(|&q| p.letter(q) != Pauli::I))
        .map(|(_, c)| c.norm_sqr())
        .sum())
}

/// The terms with a non-identity letter on qubit `j`.
pub fn dj_map(expansion: &PauliExpansion, j: usize) -> Result<PauliExpansion> {
    expansion.check_qubit(j)?;
    Ok(PauliExpansion {
        n: expansion.n,
        coeffs: expansion.iter().filter(|(p, _)| p.letter(j) != Pauli::I).map(|(p, c)| (*p, *c)).collect(),
    })
}
