//! Norm machinery for slab MHD states: interior Sobolev norms, anisotropic
//! space-time norms built from wall-damped derivatives, and the weighted
//! energy ladders used to monitor solutions and iteration differences.
//!
//! The ladder evaluator is shared by two instantiations:
//! * base 4 — five levels `e4..e8` with the low-order pressure entry replaced
//!   by a degenerate-weight variant (no plain `L^2` control of pressure);
//! * base 3 — four levels without that replacement, used for differences of
//!   successive iterates.

use machslab_eos::EosParams;
use machslab_grid::{Field, SlabGrid, VecField};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NormError {
    #[error("norm order {got} outside supported range 0..={max}")]
    OrderRange { got: usize, max: usize },
    #[error("time stack holds {depth} levels but {needed} are required")]
    InsufficientStack { depth: usize, needed: usize },
    #[error("stacks disagree in depth or grid layout")]
    MismatchedStacks,
    #[error(transparent)]
    Calc(#[from] machslab_calculus::CalcError),
}

/// Borrowed view of a state together with its time-derivative stack.
/// Level `k` of each slice holds the k-th time derivative at one instant.
#[derive(Clone, Copy)]
pub struct StackView<'a> {
    pub u: &'a [VecField],
    pub b: &'a [VecField],
    pub p: &'a [Field],
    pub s: &'a [Field],
}

impl<'a> StackView<'a> {
    pub fn depth(&self) -> usize {
        self.u.len()
    }

    fn validate(&self, needed: usize) -> Result<SlabGrid, NormError> {
        let depth = self.u.len();
        if self.b.len() != depth || self.p.len() != depth || self.s.len() != depth {
            return Err(NormError::MismatchedStacks);
        }
        if depth < needed {
            return Err(NormError::InsufficientStack { depth, needed });
        }
        let grid = self.p[0].grid().clone();
        let ok = self.u.iter().all(|f| f.grid().same_layout(&grid))
            && self.b.iter().all(|f| f.grid().same_layout(&grid))
            && self.p.iter().all(|f| f.grid().same_layout(&grid))
            && self.s.iter().all(|f| f.grid().same_layout(&grid));
        if !ok {
            return Err(NormError::MismatchedStacks);
        }
        Ok(grid)
    }
}

/// Interior Sobolev norm of order `s` (0..=4).
pub fn sobolev_norm(f: &Field, s: usize) -> Result<f64, NormError> {
    Ok(machslab_calculus::sobolev_norm_sq(f, s)?.sqrt())
}

/// Maximum supported anisotropic order.
pub const ANISO_MAX_ORDER: usize = 8;

/// Anisotropic derivative signature: time level, tangential counts, plain
/// normal count (weight 2), and wall-damped normal count (weight 1).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct OpKey {
    m: usize,
    a1: usize,
    a2: usize,
    nn: usize,
    om: usize,
}

impl OpKey {
    fn parent(&self) -> Option<(OpKey, Deriv)> {
        if self.om > 0 {
            Some((OpKey { om: self.om - 1, ..*self }, Deriv::OmegaNormal))
        } else if self.a2 > 0 {
            Some((OpKey { a2: self.a2 - 1, ..*self }, Deriv::Tangential(2)))
        } else if self.a1 > 0 {
            Some((OpKey { a1: self.a1 - 1, ..*self }, Deriv::Tangential(1)))
        } else if self.nn > 0 {
            Some((OpKey { nn: self.nn - 1, ..*self }, Deriv::Normal))
        } else {
            None
        }
    }
}

#[derive(Clone, Copy)]
enum Deriv {
    Tangential(usize),
    Normal,
    OmegaNormal,
}

/// Evaluates anisotropic derivative compositions of one scalar time stack,
/// caching intermediate fields (each key is one derivative away from its
/// parent) and per-key sums of squared plain-derivative levels.
struct ScalarEval<'a> {
    grid: SlabGrid,
    omega: Field,
    stack: &'a [&'a Field],
    fields: HashMap<OpKey, Field>,
    level_sums: HashMap<OpKey, Vec<f64>>,
}

impl<'a> ScalarEval<'a> {
    fn new(grid: &SlabGrid, stack: &'a [&'a Field]) -> Self {
        ScalarEval {
            grid: grid.clone(),
            omega: grid.weight_omega(),
            stack,
            fields: HashMap::new(),
            level_sums: HashMap::new(),
        }
    }

    fn apply(&self, f: &Field, d: Deriv) -> Field {
        let dim = self.grid.dim();
        match d {
            Deriv::Tangential(axis) => f.dx(axis),
            Deriv::Normal => f.dx(dim),
            Deriv::OmegaNormal => f.dx(dim).zip_with(&self.omega, |a, w| a * w),
        }
    }

    fn ensure(&mut self, key: OpKey) {
        if self.fields.contains_key(&key) {
            return;
        }
        let field = match key.parent() {
            None => self.stack[key.m].clone(),
            Some((pk, d)) => {
                self.ensure(pk);
                self.apply(&self.fields[&pk], d)
            }
        };
        self.fields.insert(key, field);
    }

    /// Squared L^2 norm of the composition named by `key`.
    fn l2_sq(&mut self, key: OpKey) -> f64 {
        self.sobolev_sq(key, 0)
    }

    /// Squared Sobolev norm of order `s` of the composition named by `key`.
    fn sobolev_sq(&mut self, key: OpKey, s: usize) -> f64 {
        let have = self.level_sums.get(&key).map_or(0, Vec::len);
        if have <= s {
            self.ensure(key);
            let sums = derivative_level_sums(&self.fields[&key], s);
            self.level_sums.insert(key, sums);
        }
        self.level_sums[&key][..=s].iter().sum()
    }
}

/// `sums[j]` = sum over all spatial derivative monomials of total order `j`
/// of the squared L^2 norm, each monomial counted once.
fn derivative_level_sums(f: &Field, up_to: usize) -> Vec<f64> {
    let d = f.grid().dim();
    let mut sums = vec![0.0; up_to + 1];
    sums[0] = f.l2_norm_sq();
    let mut current: Vec<(usize, Field)> = vec![(0, f.clone())];
    for level in sums.iter_mut().skip(1) {
        let mut next: Vec<(usize, Field)> = Vec::new();
        for (min_axis, g) in &current {
            // Extending only along non-decreasing axes generates each
            // monomial exactly once.
            for ax in *min_axis..d {
                next.push((ax, g.dx(ax + 1)));
            }
        }
        *level = next.iter().map(|(_, g)| g.l2_norm_sq()).sum();
        current = next;
    }
    sums
}

/// All derivative signatures of weighted total order exactly `total`, with
/// (`with_normal` = false) or without the plain normal slot.
fn signatures_exact(dim: usize, total: usize, with_normal: bool) -> Vec<OpKey> {
    let mut out = Vec::new();
    let nn_max = if with_normal { total / 2 } else { 0 };
    for nn in 0..=nn_max {
        let rest = total - 2 * nn;
        for m in 0..=rest {
            for a1 in 0..=rest - m {
                if dim == 3 {
                    for a2 in 0..=rest - m - a1 {
                        let om = rest - m - a1 - a2;
                        out.push(OpKey { m, a1, a2, nn, om });
                    }
                } else {
                    let om = rest - m - a1;
                    out.push(OpKey { m, a1, a2: 0, nn, om });
                }
            }
        }
    }
    out
}

/// Number of anisotropic derivative signatures of weighted order ≤ `m`.
pub fn aniso_index_count(dim: usize, m: usize) -> usize {
    (0..=m).map(|t| signatures_exact(dim, t, true).len()).sum()
}

/// Anisotropic space-time norm of order `m` (≤ 8): the root of the sum of
/// squared L^2 norms over every derivative signature of weighted order ≤ m,
/// where tangential, time, and wall-damped normal derivatives weigh 1 and the
/// plain normal derivative weighs 2.
pub fn aniso_norm(stack: &[Field], m: usize) -> Result<f64, NormError> {
    if m > ANISO_MAX_ORDER {
        return Err(NormError::OrderRange { got: m, max: ANISO_MAX_ORDER });
    }
    if stack.len() < m + 1 {
        return Err(NormError::InsufficientStack { depth: stack.len(), needed: m + 1 });
    }
    let grid = stack[0].grid().clone();
    if !stack.iter().all(|f| f.grid().same_layout(&grid)) {
        return Err(NormError::MismatchedStacks);
    }
    let refs: Vec<&Field> = stack.iter().collect();
    let mut eval = ScalarEval::new(&grid, &refs);
    let mut total = 0.0;
    for t in 0..=m {
        for key in signatures_exact(grid.dim(), t, true) {
            total += eval.l2_sq(key);
        }
    }
    Ok(total.sqrt())
}

/// One level-resolved report of a weighted energy ladder.
#[derive(Debug, Clone, Serialize)]
pub struct LadderReport {
    pub base: usize,
    /// `levels[l]` is the level of index `base + l`.
    pub levels: Vec<f64>,
    pub total: f64,
    pub constituents: BTreeMap<String, f64>,
}

/// The base-4 energy report with named levels.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub e4: f64,
    pub e5: f64,
    pub e6: f64,
    pub e7: f64,
    pub e8: f64,
    pub total: f64,
    pub constituents: BTreeMap<String, f64>,
}

impl EnergyReport {
    pub fn levels(&self) -> [f64; 5] {
        [self.e4, self.e5, self.e6, self.e7, self.e8]
    }
}

fn constituent_key(dim: usize, l: usize, key: &OpKey, k: usize) -> String {
    let mut alpha = Vec::with_capacity(dim + 2);
    alpha.push(key.m);
    alpha.push(key.a1);
    if dim == 3 {
        alpha.push(key.a2);
    }
    alpha.push(key.nn);
    alpha.push(key.om);
    let body = alpha.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    format!("l={l},a=[{body}],k={k}")
}

/// Generalized weighted ladder. Level `base + l` (for `l` in `0..=base`) sums,
/// over tangential derivative signatures of weighted order `2l` and extra time
/// depth `k ≤ base − l`, squared Sobolev norms of order `base − k − l` of the
/// state components, each scaled by `ε^{(k−1)₊ + 2l}`. The pressure component
/// additionally carries the square root of `f_prime_weight` exactly when the
/// signature is pure time of depth `2l` and `k = base − l`; with
/// `pressure_correction` set, the derivative-free low-order pressure entry is
/// replaced by the weighted L^2 piece plus Sobolev norms of its gradient.
pub fn energy_ladder(
    stack: StackView,
    epsilon: f64,
    f_prime_weight: &Field,
    base: usize,
    pressure_correction: bool,
) -> Result<LadderReport, NormError> {
    let needed = 2 * base + 1;
    let grid = stack.validate(needed)?;
    if !f_prime_weight.grid().same_layout(&grid) {
        return Err(NormError::MismatchedStacks);
    }
    let dim = grid.dim();

    // Scalar component stacks: d velocity, d magnetic, entropy, pressure.
    let mut component_stacks: Vec<Vec<&Field>> = Vec::new();
    for j in 1..=dim {
        component_stacks.push(stack.u.iter().map(|v| v.comp(j)).collect());
    }
    for j in 1..=dim {
        component_stacks.push(stack.b.iter().map(|v| v.comp(j)).collect());
    }
    component_stacks.push(stack.s.iter().collect());
    component_stacks.push(stack.p.iter().collect());
    let pressure_slot = component_stacks.len() - 1;

    let mut evals: Vec<ScalarEval> = component_stacks
        .iter()
        .map(|s| ScalarEval::new(&grid, s))
        .collect();

    let mut levels = vec![0.0; base + 1];
    let mut constituents = BTreeMap::new();

    for l in 0..=base {
        for sig in signatures_exact(dim, 2 * l, false) {
            let alpha0 = sig.m;
            for k in 0..=base - l {
                let sob = base - k - l;
                let weight_exp = k.saturating_sub(1) + 2 * l;
                let scale = epsilon.powi(2 * weight_exp as i32);
                let op = OpKey { m: alpha0 + k, ..sig };
                let corner = alpha0 == 2 * l && k == base - l;
                let is_base_entry = l == 0 && k == 0 && sig.m == 0 && sig.a1 == 0
                    && sig.a2 == 0 && sig.om == 0;

                let mut value = 0.0;
                for (slot, eval) in evals.iter_mut().enumerate() {
                    if slot == pressure_slot {
                        if corner {
                            // Degenerate-weight corner: L^2 with the pointwise
                            // compressibility weight under the integral.
                            eval.ensure(op);
                            let g = &eval.fields[&op];
                            value += g
                                .zip_with(f_prime_weight, |x, w| w * x * x)
                                .integrate();
                        } else if pressure_correction && is_base_entry {
                            let g = eval.stack[0];
                            value += g
                                .zip_with(f_prime_weight, |x, w| w * x * x)
                                .integrate();
                            for ax in 1..=dim {
                                value +=
                                    machslab_calculus::sobolev_norm_sq(&g.dx(ax), base - 1)?;
                            }
                        } else {
                            value += eval.sobolev_sq(op, sob);
                        }
                    } else {
                        value += eval.sobolev_sq(op, sob);
                    }
                }
                let weighted = scale * value;
                levels[l] += weighted;
                constituents.insert(constituent_key(dim, l, &sig, k), weighted);
            }
        }
    }

    let total = levels.iter().sum();
    Ok(LadderReport { base, levels, total, constituents })
}

/// The base-4 energy of a state: compressibility weight taken pointwise from
/// the state's own pressure, low-order pressure entry in corrected form.
pub fn energy(stack: StackView, params: &EosParams) -> Result<EnergyReport, NormError> {
    let fw = stack.p[0].map(|p| params.f_prime_unchecked(p));
    let ladder = energy_ladder(stack, params.epsilon, &fw, 4, true)?;
    Ok(EnergyReport {
        e4: ladder.levels[0],
        e5: ladder.levels[1],
        e6: ladder.levels[2],
        e7: ladder.levels[3],
        e8: ladder.levels[4],
        total: ladder.total,
        constituents: ladder.constituents,
    })
}

/// The base-3 ladder for iteration differences: no low-order replacement, and
/// the compressibility weight is supplied by the caller (evaluated on the
/// older iterate).
pub fn difference_ladder(
    stack: StackView,
    epsilon: f64,
    f_prime_weight: &Field,
) -> Result<LadderReport, NormError> {
    energy_ladder(stack, epsilon, f_prime_weight, 3, false)
}
