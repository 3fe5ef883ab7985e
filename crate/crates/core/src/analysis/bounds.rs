use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which term of the lower bound is smaller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    /// `2^n / (c eps^2)`.
    SingleCopy,
    /// `2^{n-k} e^{-6 c eps} / (c^3 eps^4)`.
    Memory,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCard {
    pub n: usize,
    pub k: usize,
    pub c: usize,
    pub eps: f64,
    pub single_copy_term: f64,
    pub memory_term: f64,
    /// Memory term with `k = (c - 1) n`, i.e. nothing is forced out.
    pub unbounded_memory_term: f64,
    pub value: f64,
    pub binding: Binding,
    /// Upper bound on `delta_{c,M}` behind the card, from the moment chain.
    pub delta_upper: f64,
}

/// Copy lower bound for `c`-copy protocols with `k` qubits of memory on all
/// of `P_n`, up to the unspecified constant.
pub fn lower_bound_card(n: usize, k: usize, c: usize, eps: f64) -> Result<LowerBoundCard> {
    if c == 0 || !(eps > 0.0) {
        return Err(Error::param("c and eps must be positive"));
    }
    let (nf, kf, cf) = (n as f64, k as f64, c as f64);
    let single = 2f64.powf(nf) / (cf * eps * eps);
    let tail = (-6.0 * cf * eps).exp() / (cf.powi(3) * eps.powi(4));
    let memory = 2f64.powf(nf - kf) * tail;
    let unbounded = 2f64.powf(nf - (cf - 1.0) * nf) * tail;
    let (value, binding) = if memory < single { (memory, Binding::Memory) } else { (single, Binding::SingleCopy) };
    Ok(LowerBoundCard {
        n,
        k,
        c,
        eps,
        single_copy_term: single,
        memory_term: memory,
        unbounded_memory_term: unbounded,
        value,
        binding,
        delta_upper: delta_cm_upper_from_moments(c, eps, &MomentBounds::memory(n, k, c))?,
    })
}

/// Upper bounds on `max_M E_P sum_s tr(F_s P^S)^2 / (2^{cn} tr F_s)` per
/// subset size `|S| = 1..=c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentBounds(pub Vec<f64>);

impl MomentBounds {
    /// `2^-n` for singletons and `2^{k-n}` for larger subsets.
    pub fn memory(n: usize, k: usize, c: usize) -> Self {
        let single = 2f64.powi(-(n as i32));
        let multi = 2f64.powf(k as f64 - n as f64).min(1.0);
        MomentBounds((1..=c).map(|s| if s == 1 { single } else { multi }).collect())
    }

    /// No memory restriction: `2^-n` for singletons and 1 otherwise.
    pub fn unbounded(n: usize, c: usize) -> Self {
        let single = 2f64.powi(-(n as i32));
        MomentBounds((1..=c).map(|s| if s == 1 { single } else { 1.0 }).collect())
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(sum_{S nonempty} (3 eps)^{|S|} sqrt(b_{|S|}))^2`.
pub fn delta_cm_upper_from_moments(c: usize, eps: f64, moments: &MomentBounds) -> Result<f64> {
    if moments.0.len() != c {
        return Err(Error::param(format!("{} moment bounds for c = {c}", moments.0.len())));
    }
    let sum: f64 =
        (1..=c).map(|j| binomial(c, j) * (3.0 * eps).powi(j as i32) * moments.0[j - 1].max(0.0).sqrt()).sum();
    Ok(sum * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_zero_card() {
        let card = lower_bound_card(4, 0, 2, 0.1).unwrap();
        assert!((card.single_copy_term - 16.0 / 0.02).abs() < 1e-9);
        assert!((card.memory_term - 16.0 * (-1.2f64).exp() / (8.0 * 1e-4)).abs() < 1e-6);
        assert_eq!(card.value, card.single_copy_term.min(card.memory_term));
    }

    #[test]
    fn full_memory_small_eps_binds_on_memory() {
        let card = lower_bound_card(10, 10, 2, 0.1).unwrap();
        assert_eq!(card.binding, Binding::Memory);
        assert!((card.memory_term - (-1.2f64).exp() / (8.0 * 1e-4)).abs() < 1e-6);
        assert!((card.unbounded_memory_term - card.memory_term).abs() < 1e-9);
    }

    #[test]
    fn branch_ratio_diverges() {
        let r = |eps: f64| {
            let c = lower_bound_card(3, 1, 2, eps).unwrap();
            c.memory_term / c.single_copy_term
        };
        assert!(r(1e-3) > 10.0 * r(1e-2));
    }

    #[test]
    fn moment_chain() {
        let eps = 0.1;
        let (n, k) = (4, 2);
        assert!((delta_cm_upper_from_moments(1, eps, &MomentBounds::memory(n, k, 1)).unwrap()
            - 9.0 * eps * eps / 16.0)
            .abs()
            < 1e-15);
        let two = delta_cm_upper_from_moments(2, eps, &MomentBounds::memory(n, k, 2)).unwrap();
        let want = (6.0 * eps * 0.25 + 9.0 * eps * eps * 0.5).powi(2);
        assert!((two - want).abs() < 1e-15);
        assert_eq!(delta_cm_upper_from_moments(2, 0.0, &MomentBounds::unbounded(n, 2)).unwrap(), 0.0);
        assert!(delta_cm_upper_from_moments(2, eps, &MomentBounds(vec![1.0])).is_err());
    }
}
