//! Compiled jet evaluation of expression DAGs.
//!
//! A [`Plan`] fixes, for a set of root expressions and a requested order,
//! the topological order of all reachable nodes and the jet order each node
//! must be evaluated at (a `PartialDerivative` child is needed at a higher
//! order than its parent). Executing a plan at a point evaluates every node
//! exactly once.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use super::expr::{NodeKind, SmoothMap};
use super::jet::Jet2D;
use crate::error::{Error, Result};
use crate::matrix::ONE;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JetConfig {
    /// Largest jet order any node may be evaluated at.
    pub max_order: usize,
    /// Condition-number guard for `MatInverse` nodes.
    pub cond_max: f64,
}

impl Default for JetConfig {
    fn default() -> Self {
        Self { max_order: 10, cond_max: 1e12 }
    }
}

struct Step {
    map: SmoothMap,
    order: usize,
    children: Vec<usize>,
}

pub struct Plan {
    steps: Vec<Step>,
    roots: Vec<usize>,
    order: usize,
    config: JetConfig,
}

impl Plan {
    pub fn compile(roots: &[SmoothMap], order: usize, config: JetConfig) -> Result<Self> {
        if order > config.max_order {
            return Err(Error::OrderExceeded { requested: order, max: config.max_order });
        }
        let mut index: HashMap<u64, usize> = HashMap::new();
        let mut steps: Vec<Step> = Vec::new();
        for root in roots {
            if index.contains_key(&root.id()) {
                continue;
            }
            // iterative post-order DFS
            let mut stack: Vec<(SmoothMap, usize)> = vec![(root.clone(), 0)];
            while let Some((node, next)) = stack.pop() {
                let kids = node.children();
                if next < kids.len() {
                    let child = kids[next].clone();
                    stack.push((node, next + 1));
                    if !index.contains_key(&child.id()) {
                        stack.push((child, 0));
                    }
                } else if !index.contains_key(&node.id()) {
                    let children = kids.iter().map(|c| index[&c.id()]).collect();
                    index.insert(node.id(), steps.len());
                    steps.push(Step { map: node, order: 0, children });
                }
            }
        }
        let root_idx: Vec<usize> = roots.iter().map(|r| index[&r.id()]).collect();
        for &r in &root_idx {
            steps[r].order = order;
        }
        // parents come after children in post-order
        for s in (0..steps.len()).rev() {
            let extra = match steps[s].map.kind() {
                NodeKind::PartialDerivative { dx, dy, .. } => dx + dy,
                _ => 0,
            };
            let need = steps[s].order + extra;
            if need > config.max_order {
                return Err(Error::OrderExceeded { requested: need, max: config.max_order });
            }
            for k in 0..steps[s].children.len() {
                let c = steps[s].children[k];
                steps[c].order = steps[c].order.max(need);
            }
        }
        Ok(Self { steps, roots: root_idx, order, config })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Jets of all roots at `p`, each of the plan's order.
    pub fn eval(&self, p: [f64; 2]) -> Result<Vec<Jet2D>> {
        if p[0] * p[0] + p[1] * p[1] > 1.0 + 1e-12 {
            return Err(Error::OutsideDisk(p[0], p[1]));
        }
        let mut jets: Vec<Option<Jet2D>> = vec![None; self.steps.len()];
        for (s, step) in self.steps.iter().enumerate() {
            let m = step.order;
            let child = |k: usize| jets[step.children[k]].as_ref().expect("child evaluated first");
            let jet = match step.map.kind() {
                NodeKind::Const(c) => Jet2D::constant(p, m, c),
                NodeKind::CoordX => Jet2D::coord_x(p, m),
                NodeKind::CoordY => Jet2D::coord_y(p, m),
                NodeKind::Sum(_) => {
                    let mut acc = Jet2D::zero(p, m, step.map.dim());
                    for k in 0..step.children.len() {
                        acc.axpy(ONE, child(k));
                    }
                    acc
                }
                NodeKind::ScalarScale(c, _) => child(0).truncate(m).scale(*c),
                NodeKind::MatProduct(..) => Jet2D::mul_to(child(0), child(1), m)?,
                NodeKind::MatInverse(_) => child(0).truncate(m).inverse(self.config.cond_max)?,
                NodeKind::MatExp(_) => child(0).truncate(m).exp(),
                NodeKind::ScalarCompose(prim, _) => {
                    let inner = child(0).truncate(m);
                    let taylor = prim.taylor(inner.raw()[0], m)?;
                    inner.compose_scalar(&taylor)?
                }
                NodeKind::PartialDerivative { dx, dy, .. } => child(0).truncate(m + dx + dy).partial(*dx, *dy)?,
                NodeKind::TimeSlice { .. } => child(0).truncate(m),
            };
            jets[s] = Some(jet);
        }
        Ok(self
            .roots
            .iter()
            .map(|&r| {
                let j = jets[r].as_ref().expect("root evaluated");
                j.truncate(self.order)
            })
            .collect())
    }
}

/// Evaluation context: jet settings plus a cache of compiled plans keyed by
/// (root node identities, order). Safe to share between threads.
pub struct EvalContext {
    config: JetConfig,
    plans: Mutex<HashMap<(Vec<u64>, usize), Arc<Plan>>>,
}

const PLAN_CACHE_LIMIT: usize = 512;

impl Default for EvalContext {
    fn default() -> Self {
        Self::new(JetConfig::default())
    }
}

impl EvalContext {
    pub fn new(config: JetConfig) -> Self {
        Self { config, plans: Mutex::new(HashMap::new()) }
    }

    pub fn config(&self) -> JetConfig {
        self.config
    }

    pub fn plan(&self, roots: &[SmoothMap], order: usize) -> Result<Arc<Plan>> {
        let key = (roots.iter().map(SmoothMap::id).collect::<Vec<_>>(), order);
        if let Some(p) = self.plans.lock().unwrap().get(&key) {
            return Ok(Arc::clone(p));
        }
        let plan = Arc::new(Plan::compile(roots, order, self.config)?);
        let mut cache = self.plans.lock().unwrap();
        if cache.len() >= PLAN_CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, Arc::clone(&plan));
        Ok(plan)
    }

    pub fn jet_eval(&self, expr: &SmoothMap, p: [f64; 2], order: usize) -> Result<Jet2D> {
        let plan = self.plan(std::slice::from_ref(expr), order)?;
        Ok(plan.eval(p)?.pop().unwrap())
    }

    /// Jets of every root at every point, in point order. Points are
    /// evaluated in parallel; the output does not depend on scheduling.
    pub fn eval_points(&self, roots: &[SmoothMap], points: &[[f64; 2]], order: usize) -> Result<Vec<Vec<Jet2D>>> {
        let plan = self.plan(roots, order)?;
        points.par_iter().map(|&p| plan.eval(p)).collect()
    }
}

/// Jet of `expr` at `p` with default settings.
pub fn jet_eval(expr: &SmoothMap, p: [f64; 2], order: usize) -> Result<Jet2D> {
    Plan::compile(std::slice::from_ref(expr), order, JetConfig::default())?.eval(p).map(|mut v| v.pop().unwrap())
}
