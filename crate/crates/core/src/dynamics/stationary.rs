//! The perturbed chain and its stationary distribution.

use rayon::prelude::*;

use crate::error::{ensure_capacity, Error, Result};
use crate::instance::Instance;
use crate::model::PerturbationScheme;

use super::chain::{
    build_unperturbed_chain, collect_row, support_graph, ChainAnalysis, ChainScheme,
};
use super::resistance::MAX_DESTRUCTION_BITS;

/// Largest chain solved directly; bigger chains use power iteration.
pub const DIRECT_SOLVE_LIMIT: usize = 2000;
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
const ROW_SUM_TOLERANCE: f64 = 1e-12;
const POWER_MAX_ITERATIONS: usize = 1_000_000;
const POWER_STEP_TOLERANCE: f64 = 1e-14;

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::precondition(format!(
            "epsilon {eps} is outside (0, 1)"
        )))
    }
}

/// One tick: each existing project is deleted independently with
/// probability `eps`, then one unperturbed draw-and-add step follows.
///
/// Only the destructive scheme has an exact matrix; creation errors are
/// simulated by Monte Carlo.
pub fn perturbed_transition_matrix(
    inst: &Instance,
    eps: f64,
    scheme: PerturbationScheme,
) -> Result<ChainAnalysis<f64>> {
    check_epsilon(eps)?;
    if scheme == PerturbationScheme::Uniform {
        return Err(Error::Unsupported(
            "exact perturbed matrices cover the uniform-destructive scheme only; \
             use simulation for the uniform scheme"
                .into(),
        ));
    }
    let space = inst.space();
    let longest = space.by_size().len().saturating_sub(1);
    ensure_capacity(
        "projects per state in perturbed chain",
        MAX_DESTRUCTION_BITS,
        longest,
    )?;
    let base = build_unperturbed_chain(inst)?.to_f64();

    let rows: Vec<Vec<(usize, f64)>> = (0..space.len())
        .into_par_iter()
        .map(|x| {
            let projects = space.state(x).indices();
            let l = projects.len() as i32;
            let mut entries = Vec::new();
            for mask in 0u32..(1 << projects.len()) {
                let k = mask.count_ones() as i32;
                let weight = eps.powi(k) * (1.0 - eps).powi(l - k);
                let mut kept = space.state(x).clone();
                for (b, &p) in projects.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        kept.remove(p);
                    }
                }
                let mid = space.index_of(&kept).expect("closed under removal");
                entries.extend(base.transition[mid].iter().map(|&(c, p)| (c, weight * p)));
            }
            collect_row(entries)
        })
        .collect();

    for (x, row) in rows.iter().enumerate() {
        let sum: f64 = row.iter().map(|&(_, p)| p).sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(Error::precondition(format!(
                "row {x} of the perturbed matrix sums to {sum}"
            )));
        }
    }
    Ok(ChainAnalysis::new(rows, ChainScheme::UniformDestructive))
}

/// The unique stationary distribution of a chain with one closed class.
///
/// States outside the closed class are transient and get zero mass. The
/// closed class is solved with Grassmann–Taksar–Heyman elimination, which
/// involves no subtractions, when it has at most [`DIRECT_SOLVE_LIMIT`]
/// states, and with power iteration otherwise. Fails if there are several
/// closed classes or the residual ‖πP − π‖₁ exceeds [`RESIDUAL_TOLERANCE`].
pub fn stationary_distribution(rows: &[Vec<(usize, f64)>]) -> Result<Vec<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::precondition("empty chain"));
    }
    let closed = closed_classes(rows);
    if closed.len() != 1 {
        return Err(Error::precondition(format!(
            "stationary distribution is not unique ({} closed classes)",
            closed.len()
        )));
    }
    let class = &closed[0];
    let mut local = vec![usize::MAX; n];
    for (i, &x) in class.iter().enumerate() {
        local[x] = i;
    }
    let sub: Vec<Vec<(usize, f64)>> = class
        .iter()
        .map(|&x| rows[x].iter().map(|&(c, p)| (local[c], p)).collect())
        .collect();
    let sub_pi = if sub.len() <= DIRECT_SOLVE_LIMIT {
        gth(&sub)
    } else {
        power_iteration(&sub)
    };
    let mut pi = vec![0.0; n];
    for (&x, p) in class.iter().zip(sub_pi) {
        pi[x] = p;
    }
    let r = residual(rows, &pi);
    if r > RESIDUAL_TOLERANCE {
        return Err(Error::precondition(format!(
            "stationary residual {r:e} exceeds {RESIDUAL_TOLERANCE:e}"
        )));
    }
    Ok(pi)
}

/// Strongly connected components with no edge leaving them, sorted.
fn closed_classes(rows: &[Vec<(usize, f64)>]) -> Vec<Vec<usize>> {
    let components = petgraph::algo::kosaraju_scc(&support_graph(rows));
    let mut component_of = vec![0; rows.len()];
    for (k, comp) in components.iter().enumerate() {
        for v in comp {
            component_of[v.index()] = k;
        }
    }
    let mut closed: Vec<Vec<usize>> = components
        .iter()
        .enumerate()
        .filter(|(k, comp)| {
            comp.iter().all(|v| {
                rows[v.index()]
                    .iter()
                    .all(|&(c, p)| p == 0.0 || component_of[c] == *k)
            })
        })
        .map(|(_, comp)| {
            let mut c: Vec<usize> = comp.iter().map(|v| v.index()).collect();
            c.sort_unstable();
            c
        })
        .collect();
    closed.sort();
    closed
}

fn gth(rows: &[Vec<(usize, f64)>]) -> Vec<f64> {
    let n = rows.len();
    let mut a = vec![0.0f64; n * n];
    for (r, row) in rows.iter().enumerate() {
        for &(c, p) in row {
            a[r * n + c] += p;
        }
    }
    for k in (1..n).rev() {
        let s: f64 = a[k * n..k * n + k].iter().sum();
        for i in 0..k {
            a[i * n + k] /= s;
        }
        for i in 0..k {
            let f = a[i * n + k];
            if f != 0.0 {
                for j in 0..k {
                    a[i * n + j] += f * a[k * n + j];
                }
            }
        }
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for k in 1..n {
        pi[k] = (0..k).map(|i| pi[i] * a[i * n + k]).sum();
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= total);
    pi
}

fn step(rows: &[Vec<(usize, f64)>], pi: &[f64]) -> Vec<f64> {
    let mut next = vec![0.0; pi.len()];
    for (r, row) in rows.iter().enumerate() {
        for &(c, p) in row {
            next[c] += pi[r] * p;
        }
    }
    next
}

fn power_iteration(rows: &[Vec<(usize, f64)>]) -> Vec<f64> {
    let n = rows.len();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..POWER_MAX_ITERATIONS {
        let mut next = step(rows, &pi);
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        let change: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if change < POWER_STEP_TOLERANCE {
            break;
        }
    }
    pi
}

/// ‖πP − π‖₁.
pub fn residual(rows: &[Vec<(usize, f64)>], pi: &[f64]) -> f64 {
    step(rows, pi)
        .iter()
        .zip(pi)
        .map(|(a, b)| (a - b).abs())
        .sum()
}

/// Total mass of `pi` on `states`.
pub fn mass_on(pi: &[f64], states: &[usize]) -> f64 {
    states.iter().map(|&s| pi[s]).sum()
}
