//! Anti-commutation graphs and fractional colourings.
//!
//! Colour classes are independent sets, i.e. sets of pairwise commuting
//! strings, and each one is measured through a stabilizer family that
//! contains it. The fractional chromatic number `zeta_f` sets the sample
//! cost of single-copy Clifford measurements.

pub mod lp;

use fixedbitset::FixedBitSet;
use num::{BigRational, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{PauliSet, PauliString};
use crate::stabilizer::{complete_to_family, StabilizerGroup};
use lp::{LpProblem, Relation, Sense};

/// Largest vertex count solved exactly over all maximal independent sets.
pub const EXACT_LIMIT: usize = 24;
pub const MAX_ENUMERATED_SETS: usize = 1_000_000;
const PRICING_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct AntiCommutationGraph {
    vertices: PauliSet,
    /// `commute[i]` holds every `j != i` commuting with vertex `i`
    commute: Vec<FixedBitSet>,
}

pub fn build_graph(set: &PauliSet) -> AntiCommutationGraph {
    let k = set.len();
    let mut commute = vec![FixedBitSet::with_capacity(k); k];
    for i in 0..k {
        for j in i + 1..k {
            if set.members()[i].symplectic_inner_unchecked(&set.members()[j]) == 0 {
                commute[i].insert(j);
                commute[j].insert(i);
            }
        }
    }
    AntiCommutationGraph { vertices: set.clone(), commute }
}

impl AntiCommutationGraph {
    pub fn len(&self) -> usize {
        self.commute.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commute.is_empty()
    }

    pub fn vertices(&self) -> &PauliSet {
        &self.vertices
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && !self.commute[i].contains(j)
    }

    pub fn edge_count(&self) -> usize {
        (0..self.len()).map(|i| (i + 1..self.len()).filter(|&j| self.adjacent(i, j)).count()).sum()
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(a, &i)| set[a + 1..].iter().all(|&j| !self.adjacent(i, j)))
    }

    /// Grow `set` to a maximal independent set, scanning vertices in order.
    pub fn extend_to_maximal(&self, set: &[usize]) -> Vec<usize> {
        let mut out = set.to_vec();
        for v in 0..self.len() {
            if !out.contains(&v) && out.iter().all(|&u| !self.adjacent(u, v)) {
                out.push(v);
            }
        }
        out.sort_unstable();
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetMode {
    /// Every maximal independent set (Bron-Kerbosch with pivoting).
    AllMaximal,
    /// A greedy starting pool that covers every vertex.
    Pool,
}

pub fn independent_sets(g: &AntiCommutationGraph, mode: SetMode) -> Result<Vec<Vec<usize>>> {
    match mode {
        SetMode::AllMaximal => {
            let mut out = Vec::new();
            let mut all = FixedBitSet::with_capacity(g.len());
            all.insert_range(..);
            bron_kerbosch(g, &mut Vec::new(), all, FixedBitSet::with_capacity(g.len()), &mut out)?;
            for s in out.iter_mut() {
                s.sort_unstable();
            }
            out.sort();
            Ok(out)
        }
        SetMode::Pool => {
            let mut covered = vec![false; g.len()];
            let mut pool = Vec::new();
            for v in 0..g.len() {
                if !covered[v] {
                    let s = g.extend_to_maximal(&[v]);
                    s.iter().for_each(|&u| covered[u] = true);
                    pool.push(s);
                }
            }
            Ok(pool)
        }
    }
}

fn bron_kerbosch(
    g: &AntiCommutationGraph,
    r: &mut Vec<usize>,
    mut p: FixedBitSet,
    mut x: FixedBitSet,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    if p.is_clear() && x.is_clear() {
        if out.len() >= MAX_ENUMERATED_SETS {
            return Err(Error::TooManySets(MAX_ENUMERATED_SETS));
        }
        out.push(r.clone());
        return Ok(());
    }
    let pivot = p
        .union(&x)
        .max_by_key(|&u| p.intersection(&g.commute[u]).count())
        .expect("p or x is nonempty");
    let candidates: Vec<usize> = p.difference(&g.commute[pivot]).collect();
    for v in candidates {
        r.push(v);
        let mut p2 = p.clone();
        p2.intersect_with(&g.commute[v]);
        let mut x2 = x.clone();
        x2.intersect_with(&g.commute[v]);
        bron_kerbosch(g, r, p2, x2, out)?;
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
    Ok(())
}

/// Maximum-weight independent set by branch and bound. Zero-weight vertices
/// are added afterwards so the result is maximal.
pub fn max_weight_independent_set(g: &AntiCommutationGraph, weights: &[f64]) -> (f64, Vec<usize>) {
    let mut cand = FixedBitSet::with_capacity(g.len());
    for (v, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            cand.insert(v);
        }
    }
    let mut best = (0.0, Vec::new());
    mwis(g, weights, cand, 0.0, &mut Vec::new(), &mut best);
    let set = g.extend_to_maximal(&best.1);
    (best.0, set)
}

fn mwis(
    g: &AntiCommutationGraph,
    w: &[f64],
    mut cand: FixedBitSet,
    cur: f64,
    chosen: &mut Vec<usize>,
    best: &mut (f64, Vec<usize>),
) {
    loop {
        let bound: f64 = cur + cand.ones().map(|v| w[v]).sum::<f64>();
        if bound <= best.0 + 1e-15 {
            return;
        }
        let Some(v) = cand.ones().max_by(|&a, &b| w[a].total_cmp(&w[b])) else {
            if cur > best.0 {
                *best = (cur, chosen.clone());
            }
            return;
        };
        let mut inner = cand.clone();
        inner.intersect_with(&g.commute[v]);
        chosen.push(v);
        mwis(g, w, inner, cur + w[v], chosen, best);
        chosen.pop();
        cand.set(v, false);
        if cand.is_clear() {
            if cur > best.0 {
                *best = (cur, chosen.clone());
            }
            return;
        }
    }
}

#[derive(Clone, Debug)]
pub struct FractionalColoring {
    /// Colour classes as sorted vertex indices; only positive weights kept.
    pub sets: Vec<Vec<usize>>,
    pub weights: Vec<f64>,
    pub exact_weights: Option<Vec<BigRational>>,
    pub value: f64,
    pub exact_value: Option<BigRational>,
    /// Optimal dual: vertex prices with every independent set costing at
    /// most 1. Normalised, it is the hardest distribution over vertices.
    pub vertex_prices: Vec<f64>,
    /// Primal value minus the certified dual bound.
    pub gap: f64,
}

impl FractionalColoring {
    /// Total weight of the classes containing vertex `v`.
    pub fn coverage(&self, v: usize) -> f64 {
        self.sets.iter().zip(&self.weights).filter(|(s, _)| s.contains(&v)).map(|(_, w)| w).sum()
    }

    pub fn exact_coverage(&self, v: usize) -> Option<BigRational> {
        let ws = self.exact_weights.as_ref()?;
        Some(self.sets.iter().zip(ws).filter(|(s, _)| s.contains(&v)).fold(BigRational::zero(), |acc, (_, w)| acc + w))
    }

    /// Distinguishing advantage `9 eps^2 / zeta_f` of the best single-copy
    /// Clifford strategy.
    pub fn delta_clifford(&self, eps: f64) -> f64 {
        9.0 * eps * eps / self.value
    }
}

/// Exact rational solve for up to [`EXACT_LIMIT`] vertices, column
/// generation in floating point beyond that.
pub fn fractional_coloring(g: &AntiCommutationGraph) -> Result<FractionalColoring> {
    if g.len() <= EXACT_LIMIT {
        exact_coloring(g)
    } else {
        pooled_coloring(g)
    }
}

fn covering_lp<T: lp::LpScalar>(k: usize, sets: &[Vec<usize>]) -> LpProblem<T> {
    let mut lp = LpProblem::new(Sense::Minimize, vec![T::one(); sets.len()], k);
    for (j, s) in sets.iter().enumerate() {
        lp.columns[j] = s.iter().map(|&v| (v, T::one())).collect();
    }
    lp.relations = vec![Relation::Ge; k];
    lp.rhs = vec![T::one(); k];
    lp
}

pub fn exact_coloring(g: &AntiCommutationGraph) -> Result<FractionalColoring> {
    let sets = independent_sets(g, SetMode::AllMaximal)?;
    let lp = covering_lp::<BigRational>(g.len(), &sets);
    let sol = lp.solve()?;
    // strong duality and dual feasibility hold exactly or not at all
    let dual_value = sol.duals.iter().fold(BigRational::zero(), |acc, y| acc + y);
    if dual_value != sol.objective {
        return Err(Error::Lp("exact duality check failed"));
    }
    for s in &sets {
        let load = s.iter().fold(BigRational::zero(), |acc, &v| acc + &sol.duals[v]);
        if load > num::One::one() || sol.duals.iter().any(|y| y.is_negative()) {
            return Err(Error::Lp("exact dual infeasible"));
        }
    }
    let keep: Vec<usize> = (0..sets.len()).filter(|&j| sol.x[j].is_positive()).collect();
    let exact_weights: Vec<BigRational> = keep.iter().map(|&j| sol.x[j].clone()).collect();
    Ok(FractionalColoring {
        sets: keep.iter().map(|&j| sets[j].clone()).collect(),
        weights: exact_weights.iter().map(|w| w.to_f64().unwrap_or(f64::NAN)).collect(),
        exact_weights: Some(exact_weights),
        value: sol.objective.to_f64().unwrap_or(f64::NAN),
        exact_value: Some(sol.objective),
        vertex_prices: sol.duals.iter().map(|y| y.to_f64().unwrap_or(f64::NAN)).collect(),
        gap: 0.0,
    })
}

/// Column generation: solve over a pool of sets, price with a maximum-weight
/// independent set, add it while it costs more than 1.
pub fn pooled_coloring(g: &AntiCommutationGraph) -> Result<FractionalColoring> {
    let mut pool = independent_sets(g, SetMode::Pool)?;
    loop {
        let lp = covering_lp::<f64>(g.len(), &pool);
        let sol = lp.solve()?;
        let prices: Vec<f64> = sol.duals.iter().map(|y| y.max(0.0)).collect();
        let (heaviest, set) = max_weight_independent_set(g, &prices);
        if heaviest <= 1.0 + PRICING_TOL || pool.contains(&set) {
            // prices / heaviest is dual feasible, so its sum bounds zeta_f below
            let dual_bound = prices.iter().sum::<f64>() / heaviest.max(1.0);
            let keep: Vec<usize> = (0..pool.len()).filter(|&j| sol.x[j] > 1e-12).collect();
            return Ok(FractionalColoring {
                sets: keep.iter().map(|&j| pool[j].clone()).collect(),
                weights: keep.iter().map(|&j| sol.x[j]).collect(),
                exact_weights: None,
                value: sol.objective,
                exact_value: None,
                vertex_prices: prices,
                gap: (sol.objective - dual_bound).max(0.0),
            });
        }
        pool.push(set);
    }
}

/// Colouring of `{X, Y, Z}^n` by the parity classes
/// `C_even(b), C_odd(b)` for `b` in `{(X,Y), (Y,Z), (Z,X)}^n`, each of
/// weight `2^-n`. Vertices are listed in index order.
pub fn xyz_coloring(n: usize) -> Result<(AntiCommutationGraph, FractionalColoring)> {
    if n == 0 || n > 10 {
        return Err(Error::param("xyz colouring needs 1 <= n <= 10"));
    }
    let letters = ['X', 'Y', 'Z'];
    let verts: Vec<PauliString> = (0..3usize.pow(n as u32))
        .map(|mut code| {
            let mut s = vec!['I'; n];
            for q in (0..n).rev() {
                s[q] = letters[code % 3];
                code /= 3;
            }
            s.into_iter().collect::<String>().parse()
        })
        .collect::<Result<_>>()?;
    let set = PauliSet::new(verts)?;
    let g = build_graph(&set);
    let pairs = [('X', 'Y'), ('Y', 'Z'), ('Z', 'X')];
    let weight = BigRational::new(1.into(), (num::BigInt::from(1) << n).into());
    let mut sets = Vec::with_capacity(2 * 3usize.pow(n as u32));
    for bcode in 0..3usize.pow(n as u32) {
        let mut b = vec![pairs[0]; n];
        let mut c = bcode;
        for q in (0..n).rev() {
            b[q] = pairs[c % 3];
            c /= 3;
        }
        for parity in 0..2u32 {
            let mut members = Vec::with_capacity(1 << (n - 1));
            for w in 0..1u32 << n {
                if w.count_ones() % 2 != parity {
                    continue;
                }
                let s: String = (0..n).map(|q| if (w >> (n - 1 - q)) & 1 == 1 { b[q].1 } else { b[q].0 }).collect();
                let p: PauliString = s.parse()?;
                members.push(set.position(&p).expect("vertex exists"));
            }
            members.sort_unstable();
            sets.push(members);
        }
    }
    let exact_weights = vec![weight.clone(); sets.len()];
    let total = exact_weights.iter().fold(BigRational::zero(), |acc, w| acc + w);
    let coloring = FractionalColoring {
        weights: vec![weight.to_f64().unwrap_or(f64::NAN); sets.len()],
        sets,
        exact_weights: Some(exact_weights),
        value: total.to_f64().unwrap_or(f64::NAN),
        exact_value: Some(total),
        vertex_prices: Vec::new(),
        gap: f64::NAN,
    };
    Ok((g, coloring))
}

#[derive(Clone, Debug)]
pub struct ScheduledFamily {
    pub group: StabilizerGroup,
    pub probability: f64,
    /// Indices into the Pauli set measured by this family.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct MeasurementPlan {
    pub n: usize,
    pub families: Vec<ScheduledFamily>,
    pub zeta: f64,
    pub gap: f64,
}

/// Turn each colour class into a maximal stabilizer family, sampled with
/// probability proportional to its weight.
pub fn schedule(coloring: &FractionalColoring, g: &AntiCommutationGraph) -> Result<MeasurementPlan> {
    let n = g.vertices().n();
    let total: f64 = coloring.weights.iter().sum();
    let mut families = Vec::new();
    let mut covered = vec![false; g.len()];
    for (s, &w) in coloring.sets.iter().zip(&coloring.weights) {
        if w <= 0.0 {
            continue;
        }
        let members: Vec<PauliString> = s.iter().map(|&v| g.vertices().members()[v]).collect();
        let group = complete_to_family(&members, n)?;
        let measured: Vec<usize> = (0..g.len()).filter(|&v| group.contains(&g.vertices().members()[v])).collect();
        measured.iter().for_each(|&v| covered[v] = true);
        families.push(ScheduledFamily { group, probability: w / total, members: measured });
    }
    if let Some(v) = covered.iter().position(|c| !c) {
        return Err(Error::Uncovered(g.vertices().members()[v].to_string()));
    }
    Ok(MeasurementPlan { n, families, zeta: coloring.value, gap: coloring.gap })
}

#[derive(Serialize)]
struct PlanJson<'a> {
    n: usize,
    zeta: f64,
    gap: f64,
    families: Vec<FamilyJson<'a>>,
}

#[derive(Serialize)]
struct ColoringJson<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    zeta_exact: Option<String>,
    sets: Vec<Vec<&'a PauliString>>,
    weights: &'a [f64],
    /// Normalised vertex prices: the hardest distribution over the set.
    dual: Vec<(&'a PauliString, f64)>,
    #[serde(flatten)]
    plan: PlanJson<'a>,
}

#[derive(Serialize)]
struct FamilyJson<'a> {
    probability: f64,
    generators: Vec<String>,
    members: Vec<&'a PauliString>,
}

impl MeasurementPlan {
    pub fn to_json(&self, set: &PauliSet) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.plan_json(set))?)
    }

    /// The plan together with the colouring it came from: classes, weights,
    /// exact value when known, and the dual distribution.
    pub fn document(&self, set: &PauliSet, coloring: &FractionalColoring) -> Result<String> {
        let members = set.members();
        let price_total: f64 = coloring.vertex_prices.iter().sum();
        let doc = ColoringJson {
            zeta_exact: coloring.exact_value.as_ref().map(|v| v.to_string()),
            sets: coloring.sets.iter().map(|c| c.iter().map(|&v| &members[v]).collect()).collect(),
            weights: &coloring.weights,
            dual: members
                .iter()
                .zip(&coloring.vertex_prices)
                .map(|(p, w)| (p, if price_total > 0.0 { w / price_total } else { 0.0 }))
                .collect(),
            plan: self.plan_json(set),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    fn plan_json<'a>(&self, set: &'a PauliSet) -> PlanJson<'a> {
        PlanJson {
            n: self.n,
            zeta: self.zeta,
            gap: self.gap,
            families: self
                .families
                .iter()
                .map(|f| FamilyJson {
                    probability: f.probability,
                    generators: f.group.generators().iter().map(|g| g.to_string()).collect(),
                    members: f.members.iter().map(|&v| &set.members()[v]).collect(),
                })
                .collect(),
        }
    }
}
