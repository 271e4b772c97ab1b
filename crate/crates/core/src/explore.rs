//! Exhaustive exploration of reduction graphs.
//!
//! Nodes are expressions up to α-equivalence (which is structural equality
//! here). Exploration is breadth-first and level-synchronous: each frontier
//! is expanded in parallel and merged in order, so the report does not
//! depend on the number of worker threads.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::reduce::{Reducer, RuleSet};
use crate::signature::Signature;
use crate::syntax::Expr;

pub const DEFAULT_SN_FUEL: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnReport {
    /// Distinct expressions reached, the start included.
    pub nodes: usize,
    pub edges: usize,
    /// Length of the longest reduction path. `None` when the graph was not
    /// fully explored or contains a cycle.
    pub longest_path: Option<usize>,
    /// α-distinct normal forms, sorted by printed form.
    pub normal_forms: Vec<Expr>,
    /// The graph was not shown to be finite and acyclic: either the node
    /// budget ran out or a cycle (an infinite path) was found.
    pub fuel_exhausted: bool,
    pub cycle_detected: bool,
    /// Largest expression size seen.
    pub max_size: usize,
}

impl SnReport {
    pub fn terminates(&self) -> bool {
        !self.fuel_exhausted
    }

    pub fn document(&self) -> SnDocument {
        SnDocument {
            nodes: self.nodes,
            edges: self.edges,
            longest_path: self.longest_path,
            normal_forms: self.normal_forms.iter().map(Expr::to_string).collect(),
            fuel_exhausted: self.fuel_exhausted,
            cycle_detected: self.cycle_detected,
            max_size: self.max_size,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SnDocument {
    pub nodes: usize,
    pub edges: usize,
    pub longest_path: Option<usize>,
    pub normal_forms: Vec<String>,
    pub fuel_exhausted: bool,
    pub cycle_detected: bool,
    pub max_size: usize,
}

/// Explores every reduction path from `subject`, visiting at most `fuel`
/// distinct expressions. Accepts expressions without an arity.
pub fn sn_explore(sig: &Signature, subject: &Expr, rules: &RuleSet, fuel: usize) -> SnReport {
    let reducer = Reducer::new(sig, rules);
    let mut ids: HashMap<Expr, usize> = HashMap::new();
    let mut nodes: Vec<Expr> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut out_of_fuel = fuel == 0;
    ids.insert(subject.clone(), 0);
    nodes.push(subject.clone());
    succ.push(Vec::new());
    let mut frontier = vec![0usize];
    let mut edges = 0;
    let mut expanded = vec![false];

    while !frontier.is_empty() && !out_of_fuel {
        let expansions: Vec<Vec<Expr>> = frontier
            .par_iter()
            .map(|&i| reducer.successors(&nodes[i]).into_iter().map(|(_, _, e)| e).collect())
            .collect();
        let mut next = Vec::new();
        'merge: for (&i, outs) in frontier.iter().zip(expansions) {
            for e in outs {
                let j = match ids.get(&e) {
                    Some(&j) => j,
                    None => {
                        if nodes.len() >= fuel {
                            out_of_fuel = true;
                            break 'merge;
                        }
                        let j = nodes.len();
                        ids.insert(e.clone(), j);
                        nodes.push(e);
                        succ.push(Vec::new());
                        expanded.push(false);
                        next.push(j);
                        j
                    }
                };
                succ[i].push(j);
                edges += 1;
            }
            expanded[i] = true;
        }
        frontier = next;
    }

    let max_size = nodes.iter().map(Expr::size).max().unwrap_or(0);
    let mut normal_forms: Vec<Expr> = (0..nodes.len())
        .filter(|&i| expanded[i] && succ[i].is_empty())
        .map(|i| nodes[i].clone())
        .collect();
    normal_forms.sort_by_cached_key(Expr::to_string);

    let (cycle_detected, longest) = longest_path(&succ, &expanded);
    SnReport {
        nodes: nodes.len(),
        edges,
        longest_path: if out_of_fuel || cycle_detected { None } else { longest },
        normal_forms,
        fuel_exhausted: out_of_fuel || cycle_detected,
        cycle_detected,
        max_size,
    }
}

/// Cycle detection and longest path from node 0 over the explored part of
/// the graph, iteratively to survive deep graphs.
fn longest_path(succ: &[Vec<usize>], expanded: &[bool]) -> (bool, Option<usize>) {
    const WHITE: u8 = 0;
    const GREY: u8 = 1;
    const BLACK: u8 = 2;
    let n = succ.len();
    let mut color = vec![WHITE; n];
    let mut depth = vec![0usize; n];
    let mut cycle = false;
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    color[0] = GREY;
    while let Some(&mut (v, ref mut k)) = stack.last_mut() {
        let edges = if expanded[v] { &succ[v][..] } else { &[][..] };
        if *k < edges.len() {
            let w = edges[*k];
            *k += 1;
            match color[w] {
                WHITE => {
                    color[w] = GREY;
                    stack.push((w, 0));
                }
                GREY => cycle = true,
                _ => {}
            }
        } else {
            depth[v] = edges.iter().map(|&w| depth[w] + 1).max().unwrap_or(0);
            color[v] = BLACK;
            stack.pop();
        }
    }
    (cycle, Some(depth[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_expr;

    fn explore(s: &str, fuel: usize) -> SnReport {
        let sig = Signature::builtins();
        sn_explore(&sig, &parse_expr(s, &sig).unwrap(), &RuleSet::all(), fuel)
    }

    #[test]
    fn single_beta_step() {
        let r = explore("(\\x:Type.x) y", DEFAULT_SN_FUEL);
        assert_eq!((r.nodes, r.longest_path), (2, Some(1)));
        assert_eq!(r.normal_forms.len(), 1);
        assert_eq!(r.normal_forms[0].to_string(), "y");
        assert!(!r.fuel_exhausted);
    }

    #[test]
    fn single_eta_step() {
        let r = explore("\\x:El(a).f x", DEFAULT_SN_FUEL);
        assert_eq!((r.nodes, r.longest_path), (2, Some(1)));
        assert_eq!(r.normal_forms[0].to_string(), "f");
    }

    #[test]
    fn omega_omega_cycles_at_any_fuel() {
        for fuel in [1, 2, 10, 1000] {
            let r = explore("(\\x:El(z).x x) (\\x:El(z).x x)", fuel);
            assert!(r.fuel_exhausted, "fuel {fuel}");
            assert!(r.cycle_detected, "fuel {fuel}");
            assert!(r.normal_forms.is_empty());
        }
    }

    #[test]
    fn growing_terms_run_out_of_fuel() {
        // (\x. x x x)(\x. x x x) grows at every step.
        let r = explore("(\\x:El(z).x x x) (\\x:El(z).x x x)", 50);
        assert!(r.fuel_exhausted);
        assert_eq!(r.nodes, 50);
        assert_eq!(r.longest_path, None);
    }

    #[test]
    fn diamond_counts_each_node_once() {
        // Two independent redexes: four nodes, longest path two.
        let r = explore("f ((\\x:Type.x) a) ((\\x:Type.x) b)", DEFAULT_SN_FUEL);
        assert_eq!((r.nodes, r.edges, r.longest_path), (4, 4, Some(2)));
    }

    #[test]
    fn church_style_eta_beta_overlap_has_two_normal_forms() {
        let r = explore("\\x:Type.(\\y:El(a).y) x", DEFAULT_SN_FUEL);
        let printed: Vec<String> = r.normal_forms.iter().map(|e| e.to_string()).collect();
        assert_eq!(printed, ["\\x:Type.x", "\\y:El(a).y"]);
    }

    #[test]
    fn worker_count_does_not_change_report() {
        let s = "(\\f:(x:Type)Type.f (f a)) (\\y:Type.(\\z:Type.z) y)";
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| explore(s, DEFAULT_SN_FUEL));
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| explore(s, DEFAULT_SN_FUEL));
        assert_eq!(one, many);
    }
}
