//! Stabilizer groups, their eigenbases, and coverings of the Pauli group by
//! maximal commuting families.
//!
//! Groups are unsigned: generators carry phase `+1`. A product of commuting
//! Hermitian generators can still pick up a `-1` (for example
//! `XX * ZZ = -YY`), so each group element `P_s` has a sign `sign(s)` with
//! `sign(s) P_s` equal to the ordered product of its generators. The joint
//! eigenstate with syndrome `e` then has `<P_s> = sign(s) (-1)^{<e, s>}`.

use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::pauli::{check_cap, walsh_hadamard, PauliIndex, PauliString};
use crate::quantum::{OutcomeDistribution, Povm};

const MAX_ENUMERATED_RANK: usize = 20;
const MAX_COMPLEMENT_QUBITS: usize = 10;

fn vec_of(p: &PauliString) -> u128 {
    ((p.x_bits() as u128) << 64) | p.z_bits() as u128
}

/// Row-echelon basis that remembers which input rows produced each row.
#[derive(Clone, Debug, Default)]
struct Echelon {
    rows: Vec<(u128, u64)>,
}

impl Echelon {
    fn reduce(&self, mut v: u128) -> (u128, u64) {
        let mut combo = 0u64;
        for &(row, c) in &self.rows {
            let pivot = 127 - row.leading_zeros();
            if (v >> pivot) & 1 == 1 {
                v ^= row;
                combo ^= c;
            }
        }
        (v, combo)
    }

    /// Returns false if `v` is already in the span.
    fn insert(&mut self, v: u128, id: usize) -> bool {
        let (r, combo) = self.reduce(v);
        if r == 0 {
            return false;
        }
        let pivot = 127 - r.leading_zeros();
        let row = (r, combo ^ (1u64 << id));
        // keep rows sorted by descending pivot and reduced at the new pivot
        for (other, c) in self.rows.iter_mut() {
            if (*other >> pivot) & 1 == 1 {
                *other ^= row.0;
                *c ^= row.1;
            }
        }
        let at = self.rows.iter().position(|(o, _)| 127 - o.leading_zeros() < pivot).unwrap_or(self.rows.len());
        self.rows.insert(at, row);
        true
    }
}

#[derive(Clone, Debug)]
pub struct StabilizerGroup {
    n: usize,
    generators: Vec<PauliString>,
    echelon: Echelon,
    elements: Arc<OnceLock<Vec<(PauliString, i8)>>>,
}

impl PartialEq for StabilizerGroup {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.generators == other.generators
    }
}

impl StabilizerGroup {
    /// Validates pairwise commutation and independence over GF(2).
    pub fn new(n: usize, generators: Vec<PauliString>) -> Result<Self> {
        if generators.len() > 64 {
            return Err(Error::DependentGenerators);
        }
        let mut echelon = Echelon::default();
        for (i, g) in generators.iter().enumerate() {
            if g.n() != n {
                return Err(Error::SizeMismatch { left: n, right: g.n() });
            }
            for h in &generators[..i] {
                if g.commutes(h)? < 0 {
                    return Err(Error::NotCommuting(h.to_string(), g.to_string()));
                }
            }
            if !echelon.insert(vec_of(g), i) {
                return Err(Error::DependentGenerators);
            }
        }
        Ok(StabilizerGroup { n, generators, echelon, elements: Arc::new(OnceLock::new()) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn is_maximal(&self) -> bool {
        self.rank() == self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    /// Generator coefficients `c` with `p = xor_i c_i g_i`, if `p` is in the group.
    pub fn decompose(&self, p: &PauliString) -> Option<u64> {
        if p.n() != self.n {
            return None;
        }
        let (r, combo) = self.echelon.reduce(vec_of(p));
        (r == 0).then_some(combo)
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        self.decompose(p).is_some()
    }

    /// Ordered product of the generators selected by `c`, as `(sign, P_s)`.
    pub fn signed_element(&self, c: u64) -> (i8, PauliString) {
        let mut acc = PauliString::identity(self.n);
        let mut phase = crate::pauli::Phase::ONE;
        for (i, g) in self.generators.iter().enumerate() {
            if (c >> i) & 1 == 1 {
                let (ph, p) = acc.mul_unchecked(g);
                phase = phase * ph;
                acc = p;
            }
        }
        (phase.real_sign().expect("commuting generators give a real phase"), acc)
    }

    /// All `2^rank` elements with their signs, indexed by coefficient vector.
    pub fn signed_elements(&self) -> &[(PauliString, i8)] {
        self.elements.get_or_init(|| {
            assert!(self.rank() <= MAX_ENUMERATED_RANK, "group too large to enumerate");
            (0..1u64 << self.rank())
                .map(|c| {
                    let (s, p) = self.signed_element(c);
                    (p, s)
                })
                .collect()
        })
    }

    pub fn enumerate_elements(&self) -> Vec<PauliString> {
        self.signed_elements().iter().map(|(p, _)| *p).collect()
    }

    /// Syndrome of `p`: bit `i` is `<p, g_i>`.
    pub fn syndrome(&self, p: &PauliString) -> u64 {
        self.generators
            .iter()
            .enumerate()
            .fold(0, |acc, (i, g)| acc | ((p.symplectic_inner_unchecked(g) as u64) << i))
    }

    /// Group files hold one generator per line.
    pub fn parse_text(text: &str) -> Result<Self> {
        let gens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<PauliString>>>()?;
        let n = gens.first().ok_or(Error::Empty("generator list"))?.n();
        Self::new(n, gens)
    }
}

pub fn make_group(generators: &[PauliString]) -> Result<StabilizerGroup> {
    let n = generators.first().ok_or(Error::Empty("generator list"))?.n();
    StabilizerGroup::new(n, generators.to_vec())
}

pub fn enumerate_elements(group: &StabilizerGroup) -> Vec<PauliString> {
    group.enumerate_elements()
}

/// Basis of the symplectic complement and one representative per class of
/// the quotient by it, indexed by syndrome.
#[derive(Clone, Debug)]
pub struct Complement {
    pub basis: Vec<PauliString>,
    /// `reps[e]` is the smallest string (in index order) with syndrome `e`.
    pub reps: Vec<PauliString>,
}

pub fn symplectic_complement(group: &StabilizerGroup) -> Result<Complement> {
    let n = group.n;
    if n > MAX_COMPLEMENT_QUBITS {
        return Err(Error::param(format!("complement enumeration limited to {MAX_COMPLEMENT_QUBITS} qubits")));
    }
    let r = group.rank();
    let mut reps: Vec<Option<PauliString>> = vec![None; 1 << r];
    let mut basis = Echelon::default();
    let mut basis_list = Vec::new();
    let mut found = 0;
    for v in 0..1u128 << (2 * n) {
        let p = PauliIndex::new(n, v)?.pauli();
        let syn = group.syndrome(&p) as usize;
        if reps[syn].is_none() {
            reps[syn] = Some(p);
            found += 1;
        }
        if syn == 0 && basis.insert(vec_of(&p), basis_list.len() % 64) {
            basis_list.push(p);
        }
        if found == reps.len() && basis_list.len() == 2 * n - r {
            break;
        }
    }
    Ok(Complement { basis: basis_list, reps: reps.into_iter().map(|p| p.expect("every syndrome occurs")).collect() })
}

/// Joint eigenbasis of a group. Outcome `e` is the syndrome: generator `i`
/// has eigenvalue `(-1)^{e_i}`.
#[derive(Clone, Debug)]
pub struct StabilizerBasis {
    group: StabilizerGroup,
    projectors: Arc<OnceLock<Vec<DMatrix<C64>>>>,
}

impl StabilizerBasis {
    pub fn new(group: StabilizerGroup) -> Self {
        StabilizerBasis { group, projectors: Arc::new(OnceLock::new()) }
    }

    pub fn group(&self) -> &StabilizerGroup {
        &self.group
    }

    pub fn outcomes(&self) -> usize {
        1 << self.group.rank()
    }

    /// Value read off for the element with coefficients `c` at outcome `e`.
    pub fn readout(&self, c: u64, e: u64) -> f64 {
        let sign = self.group.signed_elements()[c as usize].1 as f64;
        if (c & e).count_ones() % 2 == 0 {
            sign
        } else {
            -sign
        }
    }

    /// Projectors `prod_i (I + (-1)^{e_i} g_i) / 2`, built on first use.
    pub fn projectors(&self) -> Result<&[DMatrix<C64>]> {
        check_cap("stabilizer projector", self.group.n)?;
        Ok(self.projectors.get_or_init(|| {
            let d = 1usize << self.group.n;
            let gens: Vec<DMatrix<C64>> =
                self.group.generators.iter().map(|g| g.to_dense().expect("checked cap")).collect();
            (0..self.outcomes() as u64)
                .map(|e| {
                    let mut m = DMatrix::<C64>::identity(d, d);
                    for (i, g) in gens.iter().enumerate() {
                        let s = if (e >> i) & 1 == 1 { -0.5 } else { 0.5 };
                        let f = DMatrix::<C64>::identity(d, d) * C64::new(0.5, 0.0) + g * C64::new(s, 0.0);
                        m = &m * f;
                    }
                    m
                })
                .collect()
        }))
    }

    /// Outcome probabilities from a Pauli spectrum (indexed by `PauliIndex`).
    pub fn distribution_from_spectrum(&self, spectrum: &[f64]) -> Result<OutcomeDistribution> {
        let r = self.group.rank();
        let chi: Vec<f64> = self
            .group
            .signed_elements()
            .iter()
            .map(|(p, s)| *s as f64 * spectrum[p.index().value() as usize])
            .collect();
        let scale = 1.0 / (1u64 << r) as f64;
        OutcomeDistribution::from_raw(walsh_hadamard(&chi).into_iter().map(|v| v * scale).collect())
    }
}

pub fn eigenbasis(group: &StabilizerGroup) -> StabilizerBasis {
    StabilizerBasis::new(group.clone())
}

/// Rank-one projective measurement in the eigenbasis of a maximal group.
pub fn clifford_povm(group: &StabilizerGroup) -> Result<Povm> {
    if !group.is_maximal() {
        return Err(Error::NotMaximal { rank: group.rank(), n: group.n });
    }
    let basis = StabilizerBasis::new(group.clone());
    let elements = basis.projectors()?.to_vec();
    let labels = (0..elements.len()).map(|e| format!("{e:0width$b}", width = group.n.max(1))).collect();
    Povm::new(elements, labels)
}

/// Extend a commuting set to a maximal group by scanning the Pauli group in
/// index order and keeping every string that commutes and is independent.
pub fn complete_to_family(members: &[PauliString], n: usize) -> Result<StabilizerGroup> {
    let mut gens: Vec<PauliString> = Vec::new();
    let mut ech = Echelon::default();
    for p in members {
        if p.n() != n {
            return Err(Error::SizeMismatch { left: n, right: p.n() });
        }
        for g in &gens {
            if p.commutes(g)? < 0 {
                return Err(Error::NotCommuting(g.to_string(), p.to_string()));
            }
        }
        if ech.insert(vec_of(p), gens.len()) {
            gens.push(*p);
        }
    }
    let mut v = 1u128;
    while gens.len() < n {
        let p = PauliIndex::new(n, v)?.pauli();
        if gens.iter().all(|g| p.symplectic_inner_unchecked(g) == 0) && ech.insert(vec_of(&p), gens.len()) {
            gens.push(p);
        }
        v += 1;
    }
    StabilizerGroup::new(n, gens)
}

/// `2^m + 1` maximal groups on `m` qubits whose nontrivial elements
/// partition the nontrivial Pauli group.
#[derive(Clone, Debug)]
pub struct StabilizerCovering {
    m: usize,
    groups: Vec<StabilizerGroup>,
}

impl StabilizerCovering {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn groups(&self) -> &[StabilizerGroup] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// JSON list of generator lists.
    pub fn to_json(&self) -> Result<String> {
        let lists: Vec<Vec<String>> =
            self.groups.iter().map(|g| g.generators.iter().map(|p| p.to_string()).collect()).collect();
        Ok(serde_json::to_string_pretty(&lists)?)
    }
}

// irreducible polynomials over GF(2), including the leading term
const FIELD_POLYS: [u32; 9] = [0, 0b11, 0b111, 0b1011, 0b10011, 0b100101, 0b1000011, 0b10000011, 0b100011011];

struct Gf2m {
    m: usize,
    poly: u32,
}

impl Gf2m {
    fn mul(&self, a: u32, b: u32) -> u32 {
        let mut acc = 0u32;
        let mut a = a;
        let mut b = b;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if (a >> self.m) & 1 == 1 {
                a ^= self.poly;
            }
        }
        acc
    }

    fn trace(&self, y: u32) -> u32 {
        let mut acc = 0;
        let mut t = y;
        for _ in 0..self.m {
            acc ^= t;
            t = self.mul(t, t);
        }
        acc
    }
}

/// Covering built from a symplectic spread over `GF(2^m)`. The Z-type group
/// and the groups `{(a, alpha a)}` for each field element `alpha`, with the
/// z-part written in the trace-dual basis so every group is isotropic.
pub fn stabilizer_covering(m: usize) -> Result<StabilizerCovering> {
    if m == 0 {
        return Ok(StabilizerCovering { m, groups: vec![StabilizerGroup::new(0, vec![])?] });
    }
    if m >= FIELD_POLYS.len() {
        return Err(Error::UnsupportedCovering(m));
    }
    let f = Gf2m { m, poly: FIELD_POLYS[m] };
    let bit = |coord: usize| 1u64 << (m - 1 - coord);
    let mut groups = Vec::with_capacity((1 << m) + 1);
    let zs = (0..m).map(|j| PauliString::from_bits(m, 0, bit(j))).collect::<Result<Vec<_>>>()?;
    groups.push(StabilizerGroup::new(m, zs)?);
    for alpha in 0..1u32 << m {
        let gens = (0..m)
            .map(|j| {
                let a = 1u32 << j;
                let z = (0..m).filter(|&i| f.trace(f.mul(f.mul(alpha, a), 1 << i)) == 1).fold(0, |acc, i| acc | bit(i));
                PauliString::from_bits(m, bit(j), z)
            })
            .collect::<Result<Vec<_>>>()?;
        groups.push(StabilizerGroup::new(m, gens)?);
    }
    Ok(StabilizerCovering { m, groups })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::all_paulis;
    use crate::quantum::{outcome_distribution, pauli_spectrum, wishart_state, DensityMatrix};
    use crate::rng::stream;
    use std::collections::HashSet;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn group(gs: &[&str]) -> Result<StabilizerGroup> {
        make_group(&gs.iter().map(|s| p(s)).collect::<Vec<_>>())
    }

    #[test]
    fn z_group_elements() {
        let g = group(&["ZI", "IZ"]).unwrap();
        let els: HashSet<String> = g.enumerate_elements().iter().map(|q| q.to_string()).collect();
        assert_eq!(els, ["II", "ZI", "IZ", "ZZ"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn bell_group_carries_a_sign() {
        let g = group(&["XX", "ZZ"]).unwrap();
        let (s, q) = g.signed_element(0b11);
        assert_eq!(q, p("YY"));
        assert_eq!(s, -1);
    }

    #[test]
    fn rejects_bad_generators() {
        assert!(matches!(group(&["XI", "ZI"]), Err(Error::NotCommuting(..))));
        assert!(matches!(group(&["ZZ", "ZZ"]), Err(Error::DependentGenerators)));
        assert!(matches!(group(&["XX", "ZZ", "YY"]), Err(Error::DependentGenerators)));
    }

    #[test]
    fn complement_of_single_z() {
        let c = symplectic_complement(&group(&["Z"]).unwrap()).unwrap();
        assert_eq!(c.reps, vec![p("I"), p("X")]);
        assert_eq!(c.basis, vec![p("Z")]);
    }

    #[test]
    fn eigenbasis_is_orthonormal_and_reads_out_signs() {
        for gs in [&["XX", "ZZ"][..], &["ZI", "IZ"], &["XZ", "ZX"], &["XXX", "ZZI", "IZZ"]] {
            let g = group(gs).unwrap();
            let n = g.n();
            let b = eigenbasis(&g);
            let projs = b.projectors().unwrap();
            let d = 1 << n;
            let mut sum = DMatrix::<C64>::zeros(d, d);
            for (e, pr) in projs.iter().enumerate() {
                assert!((pr.trace().re - 1.0).abs() < 1e-12);
                assert!((pr * pr - pr).norm() < 1e-12);
                sum += pr;
                for (c, (s, _)) in g.signed_elements().iter().enumerate() {
                    let direct = s.trace_with(pr).re;
                    assert!((direct - b.readout(c as u64, e as u64)).abs() < 1e-12);
                }
            }
            assert!((sum - DMatrix::<C64>::identity(d, d)).norm() < 1e-12);
        }
    }

    #[test]
    fn fast_distribution_matches_projectors() {
        let g = group(&["XX", "ZZ"]).unwrap();
        let rho = DensityMatrix::new(wishart_state(4, 4, &mut stream(3, 0))).unwrap();
        let b = eigenbasis(&g);
        let fast = b.distribution_from_spectrum(&pauli_spectrum(&rho)).unwrap();
        let dense = outcome_distribution(&clifford_povm(&g).unwrap(), &rho).unwrap();
        for (a, c) in fast.probs().iter().zip(dense.probs()) {
            assert!((a - c).abs() < 1e-12);
        }
    }

    #[test]
    fn clifford_povm_needs_maximal_group() {
        assert!(matches!(clifford_povm(&group(&["ZI"]).unwrap()), Err(Error::NotMaximal { .. })));
    }

    #[test]
    fn coverings_partition_the_pauli_group() {
        for m in 0..=6 {
            let cov = stabilizer_covering(m).unwrap();
            assert_eq!(cov.len(), if m == 0 { 1 } else { (1 << m) + 1 });
            let mut seen = HashSet::new();
            for g in cov.groups() {
                assert!(g.is_maximal());
                for q in g.enumerate_elements().into_iter().filter(|q| !q.is_identity()) {
                    assert!(seen.insert(q), "m={m}: {q} in two groups");
                }
            }
            assert_eq!(seen.len(), (1usize << (2 * m)) - 1);
        }
        assert!(stabilizer_covering(9).is_err());
    }

    #[test]
    fn single_qubit_covering_is_xyz() {
        let cov = stabilizer_covering(1).unwrap();
        let gens: HashSet<String> = cov.groups().iter().map(|g| g.generators()[0].to_string()).collect();
        assert_eq!(gens, ["X", "Y", "Z"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn completion_examples() {
        let g = complete_to_family(&[], 2).unwrap();
        assert_eq!(g.generators(), &[p("IZ"), p("ZI")]);
        let bell = group(&["XX", "ZZ"]).unwrap();
        assert_eq!(complete_to_family(bell.generators(), 2).unwrap(), bell);
        let g = complete_to_family(&[p("XX"), p("YY")], 2).unwrap();
        assert!(g.contains(&p("ZZ")) && g.is_maximal());
        assert!(complete_to_family(&[p("XI"), p("ZI")], 2).is_err());
    }

    #[test]
    fn completion_contains_members() {
        for a in all_paulis(3).skip(1) {
            for b in all_paulis(3).skip(1) {
                if a.commutes(&b).unwrap() > 0 {
                    let g = complete_to_family(&[a, b], 3).unwrap();
                    assert!(g.is_maximal() && g.contains(&a) && g.contains(&b));
                }
            }
        }
    }

    #[test]
    fn group_file_and_covering_json() {
        let g = StabilizerGroup::parse_text("# bell\nXX\nZZ\n").unwrap();
        assert_eq!(g.rank(), 2);
        let lists: Vec<Vec<String>> = serde_json::from_str(&stabilizer_covering(2).unwrap().to_json().unwrap()).unwrap();
        assert_eq!(lists.len(), 5);
    }
}
