//! Pauli strings in symplectic form.
//!
//! A string on `n` qubits is a pair of bit masks `(x, z)`. Qubit 0 is the
//! leftmost character of the text form and the most significant tensor factor,
//! so the `x` mask is exactly the bit flip applied to a computational basis
//! index. Each factor is Hermitian: `i^{x z} X^x Z^z`, which makes `Y = iXZ`.
//!
//! Strings are limited to 64 qubits (one machine word per component).

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 64;
const DEFAULT_DENSE_CAP: usize = 7;

static CAP_OVERRIDE: AtomicUsize = AtomicUsize::new(0);
static CAP_ENV: OnceLock<usize> = OnceLock::new();

/// Largest qubit count for which dense `2^n x 2^n` matrices are built.
///
/// Defaults to 7. The `PAULIEST_DENSE_CAP` environment variable is read once;
/// [`set_dense_cap`] takes precedence over it.
pub fn dense_cap() -> usize {
    match CAP_OVERRIDE.load(Ordering::Relaxed) {
        0 => *CAP_ENV.get_or_init(|| {
            std::env::var("PAULIEST_DENSE_CAP")
                .ok()
                .and_then(|s| s.trim().parse().ok())
                .unwrap_or(DEFAULT_DENSE_CAP)
        }),
        cap => cap,
    }
}

pub fn set_dense_cap(cap: usize) {
    CAP_OVERRIDE.store(cap, Ordering::Relaxed);
}

pub(crate) fn check_cap(what: &'static str, n: usize) -> Result<()> {
    let cap = dense_cap();
    if n > cap {
        Err(Error::CapExceeded { what, n, cap })
    } else {
        Ok(())
    }
}

/// Global phase in `{1, i, -1, -i}`, stored as a power of `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> C64 {
        match self.0 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }

    /// `Some(+1 | -1)` for real phases.
    pub fn real_sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: u8,
    x: u64,
    z: u64,
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        PauliString { n: n as u8, x: 0, z: 0 }
    }

    /// Build from raw masks. Bit `n-1-q` of each mask belongs to qubit `q`.
    pub fn from_bits(n: usize, x: u64, z: u64) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::param(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        let m = mask(n);
        if x & !m != 0 || z & !m != 0 {
            return Err(Error::param("mask bits above qubit count"));
        }
        Ok(PauliString { n: n as u8, x, z })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Single-qubit factor on qubit `q` as one of `I, X, Y, Z`.
    pub fn factor(&self, q: usize) -> char {
        let b = self.n() - 1 - q;
        match ((self.x >> b) & 1, (self.z >> b) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(Error::SizeMismatch { left: self.n(), right: other.n() })
        } else {
            Ok(())
        }
    }

    /// Symplectic form `sum_j a_x b_z + a_z b_x mod 2`.
    pub fn symplectic_inner(&self, other: &Self) -> Result<u8> {
        self.check_same(other)?;
        Ok(self.symplectic_inner_unchecked(other))
    }

    #[inline]
    pub(crate) fn symplectic_inner_unchecked(&self, other: &Self) -> u8 {
        (((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) & 1) as u8
    }

    /// `+1` if the strings commute, `-1` if they anticommute.
    pub fn commutes(&self, other: &Self) -> Result<i8> {
        Ok(1 - 2 * self.symplectic_inner(other)? as i8)
    }

    /// Commutation sign as a float; sizes must already agree.
    #[inline]
    pub fn sign_against(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.n, other.n);
        if self.symplectic_inner_unchecked(other) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Product `self * other = phase * P_{a xor b}`.
    pub fn mul(&self, other: &Self) -> Result<(Phase, PauliString)> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> (Phase, PauliString) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // i^{|a_x a_z|} X^a_x Z^a_z i^{|b_x b_z|} X^b_x Z^b_z
        //   = i^{..} (-1)^{|a_z b_x|} X^x Z^z, and X^x Z^z = i^{-|x z|} P
        let k = (self.x & self.z).count_ones() as i64 + (other.x & other.z).count_ones() as i64
            + 2 * (self.z & other.x).count_ones() as i64
            - (x & z).count_ones() as i64;
        (Phase::from_power(k), PauliString { n: self.n, x, z })
    }

    /// Entry `P[b ^ x, b]`, the only nonzero entry in column `b`.
    #[inline]
    pub fn column_phase(&self, b: u64) -> C64 {
        let k = (self.x & self.z).count_ones() + 2 * (self.z & b).count_ones();
        Phase::from_power(k as i64).to_complex()
    }

    /// `out = P v` for a vector of length `2^n`.
    pub fn apply(&self, v: &[C64], out: &mut [C64]) {
        debug_assert_eq!(v.len(), 1 << self.n);
        for (b, &a) in v.iter().enumerate() {
            out[b ^ self.x as usize] = self.column_phase(b as u64) * a;
        }
    }

    /// `<psi|P|psi>` for a normalised pure state.
    pub fn expectation_pure(&self, psi: &[C64]) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for (b, &a) in psi.iter().enumerate() {
            acc += psi[b ^ self.x as usize].conj() * self.column_phase(b as u64) * a;
        }
        acc.re
    }

    /// `tr(P M)` for a `2^n x 2^n` matrix.
    pub fn trace_with(&self, m: &DMatrix<C64>) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for c in 0..m.nrows() {
            acc += self.column_phase(c as u64) * m[(c, c ^ self.x as usize)];
        }
        acc
    }

    /// `P M P` for a `2^n x 2^n` matrix.
    pub fn conjugate(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        let d = m.nrows();
        let x = self.x as usize;
        DMatrix::from_fn(d, d, |r, c| {
            // (P M P)[r, c] = P[r, r^x] M[r^x, c^x] P[c^x, c]
            let pr = self.column_phase((r ^ x) as u64);
            let pc = self.column_phase(c as u64);
            pr * m[(r ^ x, c ^ x)] * pc
        })
    }

    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        check_cap("dense Pauli", self.n())?;
        let d = 1usize << self.n;
        let mut m = DMatrix::zeros(d, d);
        for c in 0..d {
            m[(c ^ self.x as usize, c)] = self.column_phase(c as u64);
        }
        Ok(m)
    }

    pub fn index(&self) -> PauliIndex {
        let mut idx = 0u128;
        for j in 0..self.n() {
            idx |= (((self.x >> j) & 1) as u128) << (2 * j + 1);
            idx |= (((self.z >> j) & 1) as u128) << (2 * j);
        }
        PauliIndex { n: self.n, value: idx }
    }

    pub fn from_index(idx: PauliIndex) -> Self {
        let (mut x, mut z) = (0u64, 0u64);
        for j in 0..idx.n as usize {
            x |= (((idx.value >> (2 * j + 1)) & 1) as u64) << j;
            z |= (((idx.value >> (2 * j)) & 1) as u64) << j;
        }
        PauliString { n: idx.n, x, z }
    }

    /// Concatenation `self (x) other`; `self` occupies the leading qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.n() + other.n();
        if n > MAX_QUBITS {
            return Err(Error::param(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        let s = other.n();
        Ok(PauliString {
            n: n as u8,
            x: (self.x << s) | other.x,
            z: (self.z << s) | other.z,
        })
    }

    /// Restriction to qubits `start..start+len`.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        let shift = self.n() - start - len;
        let m = mask(len);
        PauliString { n: len as u8, x: (self.x >> shift) & m, z: (self.z >> shift) & m }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n() {
            write!(f, "{}", self.factor(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::InvalidPauli(s.to_string()));
        }
        let n = t.chars().count();
        if n > MAX_QUBITS {
            return Err(Error::InvalidPauli(s.to_string()));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, ch) in t.chars().enumerate() {
            let b = 1u64 << (n - 1 - q);
            match ch {
                'I' => {}
                'X' => x |= b,
                'Y' => {
                    x |= b;
                    z |= b
                }
                'Z' => z |= b,
                _ => return Err(Error::InvalidPauli(s.to_string())),
            }
        }
        Ok(PauliString { n: n as u8, x, z })
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn parse_pauli(s: &str) -> Result<PauliString> {
    s.parse()
}

pub fn format_pauli(p: &PauliString) -> String {
    p.to_string()
}

/// `P^S`: `p` placed on every copy listed in `copies` (0-based) out of `c`,
/// identity elsewhere.
pub fn embed(p: &PauliString, copies: &[usize], c: usize) -> Result<PauliString> {
    let n = p.n();
    if c * n > MAX_QUBITS {
        return Err(Error::param(format!("{} qubits exceeds {MAX_QUBITS}", c * n)));
    }
    let (mut x, mut z) = (0u64, 0u64);
    for &j in copies {
        if j >= c {
            return Err(Error::param(format!("copy {j} out of range for {c} copies")));
        }
        let shift = (c - 1 - j) * n;
        x |= p.x << shift;
        z |= p.z << shift;
    }
    Ok(PauliString { n: (c * n) as u8, x, z })
}

/// Interleaved bit index `(x_1, z_1, ..., x_n, z_n)`, read as a big-endian
/// integer. Index 0 is the identity and `Z < X < Y` on a single qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliIndex {
    n: u8,
    value: u128,
}

impl PauliIndex {
    pub fn new(n: usize, value: u128) -> Result<Self> {
        if n > MAX_QUBITS || (n < 64 && value >= 1u128 << (2 * n)) {
            return Err(Error::param(format!("index {value} out of range for {n} qubits")));
        }
        Ok(PauliIndex { n: n as u8, value })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn value(&self) -> u128 {
        self.value
    }

    pub fn pauli(&self) -> PauliString {
        PauliString::from_index(*self)
    }
}

/// All `4^n` strings in index order.
pub fn all_paulis(n: usize) -> impl Iterator<Item = PauliString> {
    assert!(n <= 31, "enumeration limited to 31 qubits");
    (0..1u128 << (2 * n)).map(move |v| PauliString::from_index(PauliIndex { n: n as u8, value: v }))
}

/// `g(Q) = sum_a f(a) * sign(a, Q)` for all `Q`, where `sign` is the
/// commutation sign. Both `f` and `g` are indexed by [`PauliIndex`] value.
pub fn symplectic_fourier(f: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(f.len(), 1 << (2 * n));
    let h = walsh_hadamard(f);
    let len = h.len();
    // the Walsh transform pairs x with x and z with z; the symplectic form
    // pairs x with z, so read the transform at the x/z swapped index
    let mut g = vec![0.0; len];
    for (q, gq) in g.iter_mut().enumerate() {
        *gq = h[swap_xz(q as u128, n) as usize];
    }
    g
}

/// Unnormalised Walsh-Hadamard transform `g(w) = sum_v f(v) (-1)^{v . w}`.
pub fn walsh_hadamard(f: &[f64]) -> Vec<f64> {
    assert!(f.len().is_power_of_two());
    let mut h = f.to_vec();
    let len = h.len();
    let mut step = 1;
    while step < len {
        for block in (0..len).step_by(2 * step) {
            for i in block..block + step {
                let (a, b) = (h[i], h[i + step]);
                h[i] = a + b;
                h[i + step] = a - b;
            }
        }
        step *= 2;
    }
    h
}

fn swap_xz(v: u128, n: usize) -> u128 {
    let mut out = 0u128;
    for j in 0..n {
        out |= ((v >> (2 * j + 1)) & 1) << (2 * j);
        out |= ((v >> (2 * j)) & 1) << (2 * j + 1);
    }
    out
}

/// A set of distinct Pauli strings on a common number of qubits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<PauliString>", into = "Vec<PauliString>")]
pub struct PauliSet {
    n: usize,
    members: Vec<PauliString>,
}

impl PauliSet {
    pub fn new(members: Vec<PauliString>) -> Result<Self> {
        let first = members.first().ok_or(Error::Empty("Pauli set"))?;
        let n = first.n();
        let mut seen = HashSet::with_capacity(members.len());
        for p in &members {
            if p.n() != n {
                return Err(Error::SizeMismatch { left: n, right: p.n() });
            }
            if !seen.insert(*p) {
                return Err(Error::Duplicate(p.to_string()));
            }
        }
        Ok(PauliSet { n, members })
    }

    /// The full group `P_n`, identity first.
    pub fn all(n: usize) -> Self {
        PauliSet { n, members: all_paulis(n).collect() }
    }

    pub fn nontrivial(n: usize) -> Self {
        PauliSet { n, members: all_paulis(n).skip(1).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[PauliString] {
        &self.members
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PauliString> {
        self.members.iter()
    }

    pub fn position(&self, p: &PauliString) -> Option<usize> {
        self.members.iter().position(|q| q == p)
    }

    /// One string per line; `#` starts a comment, blank lines are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let members = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for p in &self.members {
            s.push_str(&p.to_string());
            s.push('\n');
        }
        s
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::parse_text(&std::fs::read_to_string(path)?)
    }
}

impl TryFrom<Vec<PauliString>> for PauliSet {
    type Error = Error;
    fn try_from(v: Vec<PauliString>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PauliSet> for Vec<PauliString> {
    fn from(s: PauliSet) -> Self {
        s.members
    }
}

impl<'a> IntoIterator for &'a PauliSet {
    type Item = &'a PauliString;
    type IntoIter = std::slice::Iter<'a, PauliString>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    // textbook matrices, built without any of the bit tricks above
    fn single(ch: char) -> DMatrix<C64> {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        match ch {
            'I' => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
            'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            'Y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            'Z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
            _ => unreachable!(),
        }
    }

    fn oracle(s: &str) -> DMatrix<C64> {
        s.chars().fold(DMatrix::from_element(1, 1, c(1.0, 0.0)), |acc, ch| acc.kronecker(&single(ch)))
    }

    fn close(a: &DMatrix<C64>, b: &DMatrix<C64>) -> bool {
        (a - b).iter().all(|v| v.norm() < 1e-12)
    }

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
        (0..1u64 << n, 0..1u64 << n).prop_map(move |(x, z)| PauliString::from_bits(n, x, z).unwrap())
    }

    #[test]
    fn dense_matches_textbook() {
        for s in ["X", "Y", "Z", "XY", "ZYX", "IYZI"] {
            assert!(close(&p(s).to_dense().unwrap(), &oracle(s)), "{s}");
        }
    }

    #[test]
    fn y_is_i_x_z() {
        let x = oracle("X");
        let z = oracle("Z");
        let y = &x * &z * c(0.0, 1.0);
        assert!(close(&y, &p("Y").to_dense().unwrap()));
    }

    #[test]
    fn xz_product_phase() {
        let (ph, r) = p("X").mul(&p("Z")).unwrap();
        assert_eq!(r, p("Y"));
        assert_eq!(ph, Phase::MINUS_I);
    }

    #[test]
    fn commutation_examples() {
        assert_eq!(p("XX").commutes(&p("ZZ")).unwrap(), 1);
        assert_eq!(p("XI").commutes(&p("ZI")).unwrap(), -1);
        assert_eq!(p("XZ").symplectic_inner(&p("ZX")).unwrap(), 0);
        assert!(matches!(p("X").commutes(&p("XX")), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn single_qubit_index_order() {
        let order: Vec<String> = all_paulis(1).map(|q| q.to_string()).collect();
        assert_eq!(order, ["I", "Z", "X", "Y"]);
        assert_eq!(p("II").index().value(), 0);
        assert_eq!(p("IZ").index().value(), 1);
        assert_eq!(p("ZI").index().value(), 4);
    }

    #[test]
    fn embed_examples() {
        assert_eq!(embed(&p("X"), &[0, 1], 2).unwrap(), p("XX"));
        assert_eq!(embed(&p("XZ"), &[1], 2).unwrap(), p("IIXZ"));
        assert_eq!(embed(&p("Y"), &[], 3).unwrap(), p("III"));
        assert!(embed(&p("X"), &[2], 2).is_err());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_pauli("XQZ").is_err());
        assert!(parse_pauli("").is_err());
        assert_eq!(format_pauli(&parse_pauli(" XYZ ").unwrap()), "XYZ");
    }

    #[test]
    fn set_file_format() {
        let s = PauliSet::parse_text("# header\nXX\n\nZZ  # trailing\nYY\n").unwrap();
        assert_eq!(s.len(), 3);
        assert!(PauliSet::parse_text("XX\nXX\n").is_err());
        assert!(PauliSet::parse_text("XX\nX\n").is_err());
        assert!(PauliSet::parse_text("# nothing\n").is_err());
    }

    #[test]
    fn dense_cap_guard() {
        let big = PauliString::identity(dense_cap() + 1);
        assert!(matches!(big.to_dense(), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn fourier_matches_direct_sum() {
        let n = 2;
        let f: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin()).collect();
        let g = symplectic_fourier(&f, n);
        for (qi, q) in all_paulis(n).enumerate() {
            let direct: f64 = all_paulis(n).enumerate().map(|(ai, a)| f[ai] * a.sign_against(&q)).sum();
            assert!((g[qi] - direct).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn mul_matches_dense(a in arb_pauli(3), b in arb_pauli(3)) {
            let (ph, r) = a.mul(&b).unwrap();
            let lhs = oracle(&a.to_string()) * oracle(&b.to_string());
            let rhs = oracle(&r.to_string()) * ph.to_complex();
            prop_assert!(close(&lhs, &rhs));
        }

        #[test]
        fn commutes_matches_dense(a in arb_pauli(3), b in arb_pauli(3)) {
            let (da, db) = (oracle(&a.to_string()), oracle(&b.to_string()));
            let s = a.commutes(&b).unwrap() as f64;
            prop_assert!(close(&(&da * &db), &(&db * &da * c(s, 0.0))));
        }

        #[test]
        fn symplectic_form_bilinear_symmetric(a in arb_pauli(4), b in arb_pauli(4), d in arb_pauli(4)) {
            let ab = a.symplectic_inner(&b).unwrap();
            prop_assert_eq!(ab, b.symplectic_inner(&a).unwrap());
            let (_, bd) = b.mul(&d).unwrap();
            prop_assert_eq!(a.symplectic_inner(&bd).unwrap(), ab ^ a.symplectic_inner(&d).unwrap());
            prop_assert_eq!(a.symplectic_inner(&a).unwrap(), 0);
        }

        #[test]
        fn text_and_index_round_trip(a in arb_pauli(6)) {
            prop_assert_eq!(parse_pauli(&format_pauli(&a)).unwrap(), a);
            prop_assert_eq!(PauliString::from_index(a.index()), a);
        }

        #[test]
        fn trace_and_conjugate_match_dense(a in arb_pauli(2), seed in 0u64..1000) {
            let d = 4;
            let m = DMatrix::from_fn(d, d, |r, col| c(((r * 7 + col * 3 + seed as usize) % 11) as f64, (r as f64 - col as f64) * 0.5));
            let pd = oracle(&a.to_string());
            let tr = (&pd * &m).trace();
            prop_assert!((a.trace_with(&m) - tr).norm() < 1e-10);
            prop_assert!(close(&a.conjugate(&m), &(&pd * &m * &pd)));
        }
    }
}
