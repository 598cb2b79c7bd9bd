//! Quadratic APN search under a linear self-equivalence constraint
//! `F(A x) = B F(x)`.
//!
//! Fixing `F(x) = y` fixes the whole orbit `F(A^i x) = B^i y`, so the tree
//! runs over A-orbit representatives. When `|Fix_A| = |Fix_B| = 2^k`, `F`
//! restricted to `Fix_A` is read through basis maps as a `k`-bit quadratic
//! APN function and is seeded from a small library instead of guessed.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use log::{debug, info};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolfun::Vbf;
use crate::classes::{admissibility, CanonicalClass};
use crate::equiv::Fingerprint;
use crate::error::Error;
use crate::linalg::{BitMatrix, Subspace};
use crate::search::{search, SearchOutcome, SearchState};
use crate::switching::{switch_sweep, DEFAULT_ENUMERATION_CAP};

const SEEDS_6: &str = include_str!("../data/seeds6.lut");

/// Orbit structure and visiting order for one `(A, B)` pair.
#[derive(Clone, Debug)]
pub struct OrbitPlan {
    n: usize,
    a: BitMatrix,
    b: BitMatrix,
    orbit_len: Vec<u32>,
    b_orbit_len: Vec<u32>,
    order: Vec<u32>,
    forced: Vec<(u32, u32)>,
    fix_a: Subspace,
    fix_b: Subspace,
    seeded: bool,
}

impl OrbitPlan {
    pub fn new(a: BitMatrix, b: BitMatrix) -> Result<Self, Error> {
        let n = a.n();
        if b.n() != n {
            return Err(Error::InvalidArgument("A and B differ in dimension".into()));
        }
        if !a.is_invertible() || !b.is_invertible() {
            return Err(Error::InvalidArgument("A and B must be invertible".into()));
        }
        if a.is_identity() && b.is_identity() {
            return Err(Error::InvalidArgument("trivial class A = B = I".into()));
        }
        let size = 1u32 << n;
        let orbit_len: Vec<u32> = (0..size).map(|x| a.orbit_length(x) as u32).collect();
        let b_orbit_len: Vec<u32> = (0..size).map(|y| b.orbit_length(y) as u32).collect();
        let fix_a = a.fixed_space();
        let fix_b = b.fixed_space();
        let (fa, fb) = (fix_a.size(), fix_b.size());
        let seeded = fa == fb && fa > 1;

        let mut forced = vec![(0, 0)];
        if !seeded && fa == 2 && fb > 2 {
            forced.push((fix_a.basis()[0], 0));
        }
        let mut seen = vec![false; size as usize];
        let mut moving = Vec::new();
        let mut fixed = Vec::new();
        for x in 0..size {
            if seen[x as usize] {
                continue;
            }
            let mut y = x;
            loop {
                seen[y as usize] = true;
                y = a.apply(y);
                if y == x {
                    break;
                }
            }
            let is_fixed = orbit_len[x as usize] == 1;
            if x == 0 || forced.iter().any(|&(p, _)| p == x) || (seeded && is_fixed) {
                continue;
            }
            if is_fixed { fixed.push(x) } else { moving.push(x) }
        }
        let order = if 2 < fa && fa < fb {
            moving.into_iter().chain(fixed).collect()
        } else {
            let mut all: Vec<u32> = moving.into_iter().chain(fixed).collect();
            all.sort_unstable();
            all
        };
        Ok(OrbitPlan { n, a, b, orbit_len, b_orbit_len, order, forced, fix_a, fix_b, seeded })
    }

    /// Plan for a canonical class; inadmissible classes are rejected.
    pub fn from_class(class: &CanonicalClass) -> Result<Self, Error> {
        let verdict = admissibility(class, None);
        if !verdict.is_admissible() {
            return Err(Error::Precondition(format!("class {} is excluded: {verdict}", class.index)));
        }
        OrbitPlan::new(class.a, class.b)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &BitMatrix {
        &self.a
    }

    pub fn b(&self) -> &BitMatrix {
        &self.b
    }

    /// Free orbit representatives in visiting order.
    pub fn position_order(&self) -> &[u32] {
        &self.order
    }

    /// Assignments made before the recursion, starting with `F(0) = 0`.
    pub fn forced(&self) -> &[(u32, u32)] {
        &self.forced
    }

    pub fn orbit_length(&self, x: u32) -> u32 {
        self.orbit_len[x as usize]
    }

    /// All A-orbits, each listed as `x, A x, A^2 x, ...` from its smallest element.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; 1 << self.n];
        let mut out = Vec::new();
        for x in 0..1u32 << self.n {
            if !seen[x as usize] {
                let orbit = self.orbit(x);
                for &y in &orbit {
                    seen[y as usize] = true;
                }
                out.push(orbit);
            }
        }
        out
    }

    fn orbit(&self, x: u32) -> Vec<u32> {
        let mut out = vec![x];
        let mut y = self.a.apply(x);
        while y != x {
            out.push(y);
            y = self.a.apply(y);
        }
        out
    }

    pub fn fix_a(&self) -> &Subspace {
        &self.fix_a
    }

    pub fn fix_b(&self) -> &Subspace {
        &self.fix_b
    }

    /// Dimension `k` of the seeded fixed space, if seeding applies.
    pub fn seed_dim(&self) -> Option<usize> {
        self.seeded.then(|| self.fix_a.dim())
    }

    /// `B^len(x) y = y`, necessary for `F(x) = y`.
    pub fn closes(&self, x: u32, y: u32) -> bool {
        self.orbit_len[x as usize] % self.b_orbit_len[y as usize] == 0
    }

    /// `F(A x) = B F(x)` at every point.
    pub fn satisfied_by(&self, f: &Vbf) -> bool {
        (0..1u32 << self.n).all(|x| f.eval(self.a.apply(x)) == self.b.apply(f.eval(x)))
    }
}

/// Quadratic APN representatives in dimensions 1 to 6, each with `G(0) = 0`.
#[derive(Clone, Debug)]
pub struct SeedLibrary {
    tables: BTreeMap<usize, Vec<Vbf>>,
}

impl SeedLibrary {
    /// `k = 1`: the zero map. `k = 2, 3, 4`: `x^3`. `k = 5`: `x^3`, `x^5`.
    /// `k = 6`: the shipped list.
    pub fn builtin() -> Result<Self, Error> {
        let mut lib = SeedLibrary { tables: BTreeMap::new() };
        lib.insert(1, vec![Vbf::constant(1, 0)?])?;
        for k in 2..=5 {
            lib.insert(k, vec![crate::known::power_map(k, 3)])?;
        }
        lib.tables.get_mut(&5).expect("just inserted").push(crate::known::power_map(5, 5));
        lib.insert(6, parse_tables(SEEDS_6)?)?;
        Ok(lib)
    }

    /// Replaces the list for `k`, verifying every table.
    pub fn insert(&mut self, k: usize, tables: Vec<Vbf>) -> Result<(), Error> {
        for (i, g) in tables.iter().enumerate() {
            if g.n() != k || g.eval(0) != 0 || !g.is_apn() || g.algebraic_degree() > 2 {
                return Err(Error::Precondition(format!("seed {i} for k = {k} is not a normalized quadratic APN table")));
            }
        }
        self.tables.insert(k, tables);
        Ok(())
    }

    pub fn get(&self, k: usize) -> &[Vbf] {
        self.tables.get(&k).map_or(&[], |v| v.as_slice())
    }

    pub fn dims(&self) -> impl Iterator<Item = usize> + '_ {
        self.tables.keys().copied()
    }
}

/// Tables in the lookup-table text format, concatenated.
pub fn parse_tables(text: &str) -> Result<Vec<Vbf>, Error> {
    let mut out = Vec::new();
    let mut block = String::new();
    for line in text.lines() {
        if line.trim_start().starts_with("n=") && block.lines().any(|l| l.trim_start().starts_with("n=")) {
            out.push(Vbf::from_lut_text(&block)?);
            block.clear();
        }
        block.push_str(line);
        block.push('\n');
    }
    if block.lines().any(|l| l.trim_start().starts_with("n=")) {
        out.push(Vbf::from_lut_text(&block)?);
    }
    Ok(out)
}

pub fn format_tables(tables: &[Vbf]) -> String {
    tables.iter().map(Vbf::to_lut_text).collect()
}

/// Collects quadratic APN functions with distinct fingerprints by alternating
/// plain searches with switching sweeps, until `target` are found or the
/// deadline passes. Every table is normalized to `G(0) = 0`; the result is
/// sorted by fingerprint.
pub fn collect_representatives(
    n: usize,
    target: usize,
    rng_seed: u64,
    budget: Duration,
) -> Result<Vec<Vbf>, Error> {
    let deadline = Instant::now() + budget;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut found: BTreeMap<Fingerprint, Vbf> = BTreeMap::new();
    let mut swept: BTreeSet<Fingerprint> = BTreeSet::new();
    while found.len() < target && Instant::now() < deadline {
        let pending: Vec<(Fingerprint, Vbf)> =
            found.iter().filter(|(fp, _)| !swept.contains(*fp)).map(|(fp, f)| (fp.clone(), f.clone())).collect();
        if pending.is_empty() {
            let left = deadline.saturating_duration_since(Instant::now());
            if let SearchOutcome::Found(f) = search(n, &mut rng, Some(left.min(crate::search::default_budget(n))))? {
                found.entry(Fingerprint::of(&f)?).or_insert(f);
            }
            continue;
        }
        for (fp, f) in pending {
            swept.insert(fp);
            for (g_fp, (_, g)) in switch_sweep(&f, DEFAULT_ENUMERATION_CAP)?.classes {
                let c = g.eval(0);
                let g = Vbf::from_fn(n, |x| g.eval(x) ^ c)?;
                found.entry(g_fp).or_insert(g);
            }
            if Instant::now() >= deadline {
                break;
            }
        }
        debug!("representatives n={n}: {} fingerprints", found.len());
    }
    Ok(found.into_values().collect())
}

/// A subset of `{M : M X = X M, M v = v for v in fix}` containing every
/// power of `X`, plus up to `samples` random invertible solutions of the
/// linear conditions.
pub fn commuting_set<R: Rng + ?Sized>(x: &BitMatrix, fix: &Subspace, samples: usize, rng: &mut R) -> Vec<BitMatrix> {
    let n = x.n();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut m = BitMatrix::identity(n);
    loop {
        if !seen.insert(m.rows().to_vec()) {
            break;
        }
        out.push(m);
        m = m.mul(x);
    }
    if samples == 0 {
        return out;
    }
    let Some((particular, kernel)) = commuting_space(x, fix) else {
        return out;
    };
    let base = out.len();
    for _ in 0..samples.saturating_mul(4) {
        if out.len() >= base + samples {
            break;
        }
        let mut bits = particular;
        for k in &kernel {
            if rng.gen::<bool>() {
                bits ^= k;
            }
        }
        let cand = matrix_from_bits(n, bits);
        if cand.is_invertible() && seen.insert(cand.rows().to_vec()) {
            out.push(cand);
        }
    }
    out
}

fn matrix_from_bits(n: usize, bits: u128) -> BitMatrix {
    let mut m = BitMatrix::zero(n);
    for i in 0..n {
        for j in 0..n {
            if bits >> (i * n + j) & 1 == 1 {
                m.set(i, j, true);
            }
        }
    }
    m
}

// Affine solution set `particular + span(kernel)` of the conditions, with
// entry (i, j) of M as unknown i*n + j.
fn commuting_space(x: &BitMatrix, fix: &Subspace) -> Option<(u128, Vec<u128>)> {
    let n = x.n();
    let vars = n * n;
    let images: Vec<(BitMatrix, Vec<u32>)> = (0..vars)
        .map(|k| {
            let e = matrix_from_bits(n, 1u128 << k);
            let comm = e.mul(x).add(&x.mul(&e));
            (comm, fix.basis().iter().map(|&v| e.apply(v)).collect())
        })
        .collect();
    let mut rows: Vec<(u128, bool)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mask = (0..vars).filter(|&k| images[k].0.get(i, j)).fold(0u128, |m, k| m | 1 << k);
            rows.push((mask, false));
        }
    }
    for (l, &v) in fix.basis().iter().enumerate() {
        for bit in 0..n {
            let mask = (0..vars).filter(|&k| images[k].1[l] >> bit & 1 == 1).fold(0u128, |m, k| m | 1 << k);
            rows.push((mask, v >> bit & 1 == 1));
        }
    }
    solve_affine(rows, vars)
}

fn solve_affine(mut rows: Vec<(u128, bool)>, vars: usize) -> Option<(u128, Vec<u128>)> {
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for c in 0..vars {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].0 >> c & 1 == 1) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.0 >> c & 1 == 1 {
                row.0 ^= pivot.0;
                row.1 ^= pivot.1;
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    if rows[r..].iter().any(|&(m, b)| m == 0 && b) {
        return None;
    }
    let mut particular = 0u128;
    for &(ri, c) in &pivots {
        if rows[ri].1 {
            particular |= 1 << c;
        }
    }
    let pivot_cols: BTreeSet<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let kernel = (0..vars)
        .filter(|c| !pivot_cols.contains(c))
        .map(|free| {
            let mut v = 1u128 << free;
            for &(ri, c) in &pivots {
                if rows[ri].0 >> free & 1 == 1 {
                    v |= 1 << c;
                }
            }
            v
        })
        .collect();
    Some((particular, kernel))
}

/// Lexicographic-minimality test over the assignment order against
/// `C_B o F o C_A` for a fixed list of pairs.
#[derive(Clone, Debug)]
pub struct Pruner {
    pairs: Vec<(Vec<u32>, Vec<u32>)>,
}

impl Pruner {
    /// Pairs `(C, I)` and `(I, D)` for the given sets, plus `cross` random
    /// pairs `(C, D)`; the identity pair is dropped.
    pub fn new<R: Rng + ?Sized>(ca: &[BitMatrix], cb: &[BitMatrix], cross: usize, rng: &mut R) -> Self {
        let n = ca.first().or(cb.first()).map_or(0, BitMatrix::n);
        let id = BitMatrix::identity(n);
        let table = |m: &BitMatrix| -> Vec<u32> { (0..1u32 << n).map(|x| m.apply(x)).collect() };
        let mut set = BTreeSet::new();
        let mut push = |c: &BitMatrix, d: &BitMatrix| {
            if !(c.is_identity() && d.is_identity()) {
                set.insert((table(c), table(d)));
            }
        };
        for c in ca {
            push(c, &id);
        }
        for d in cb {
            push(&id, d);
        }
        if !ca.is_empty() && !cb.is_empty() {
            for _ in 0..cross {
                push(&ca[rng.gen_range(0..ca.len())], &cb[rng.gen_range(0..cb.len())]);
            }
        }
        Pruner { pairs: set.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Applies `(C_A, C_B)` to a complete table.
    pub fn transforms(&self, f: &Vbf) -> Vec<Vbf> {
        self.pairs
            .iter()
            .map(|(ca, cb)| Vbf::from_fn(f.n(), |x| cb[f.eval(ca[x as usize]) as usize]).expect("same dimension"))
            .collect()
    }

    /// False if some pair produces a strictly smaller table on the known prefix.
    pub fn is_minimal(&self, state: &SearchState, assigned: &[u32]) -> bool {
        'pairs: for (ca, cb) in &self.pairs {
            for &p in assigned {
                let Some(v) = state.value(ca[p as usize]) else {
                    continue 'pairs;
                };
                let t = cb[v as usize];
                let f = state.value(p).expect("assigned position");
                if t < f {
                    return false;
                }
                if t > f {
                    continue 'pairs;
                }
            }
        }
        true
    }
}

/// Assigns `F` on `Fix_A` as `pi_b o G o pi_a^-1`; false if a check fails.
pub fn seed_fixed_subspace(state: &mut SearchState, pi_a: &Subspace, pi_b: &Subspace, g: &Vbf) -> bool {
    debug_assert_eq!(pi_a.dim(), g.n());
    for c in 0..1u32 << g.n() {
        let x = pi_a.combine(c);
        let y = pi_b.combine(g.eval(c));
        match state.value(x) {
            Some(v) if v == y => continue,
            Some(_) => return false,
            None => {
                if !state.add_point(x, y) {
                    return false;
                }
            }
        }
    }
    true
}

struct Walker<'a> {
    plan: &'a OrbitPlan,
    state: SearchState,
    orders: Option<Vec<Vec<u32>>>,
    pruner: Option<&'a Pruner>,
    assigned: Vec<u32>,
    deadline: Option<Instant>,
    nodes: u64,
    max_depth: usize,
    timed_out: bool,
}

impl<'a> Walker<'a> {
    fn new(plan: &'a OrbitPlan, orders: Option<Vec<Vec<u32>>>, pruner: Option<&'a Pruner>, deadline: Option<Instant>) -> Self {
        Walker {
            plan,
            state: SearchState::new(plan.n).expect("plan dimension"),
            orders,
            pruner,
            assigned: Vec::with_capacity(1 << plan.n),
            deadline,
            nodes: 0,
            max_depth: 0,
            timed_out: false,
        }
    }

    /// Forced points, then the seeded fixed space if any.
    fn prepare(&mut self, seed: Option<(&Subspace, &Subspace, &Vbf)>) -> bool {
        for &(x, y) in &self.plan.forced {
            if !self.state.add_point(x, y) {
                return false;
            }
            self.assigned.push(x);
        }
        if let Some((pa, pb, g)) = seed {
            if !seed_fixed_subspace(&mut self.state, pa, pb, g) {
                return false;
            }
            for c in 0..1u32 << g.n() {
                let x = pa.combine(c);
                if !self.assigned.contains(&x) {
                    self.assigned.push(x);
                }
            }
        }
        true
    }

    /// Assigns the orbit of `x` from `F(x) = y`; rolls back on failure.
    fn assign_orbit(&mut self, x: u32, y: u32) -> bool {
        let len = self.plan.orbit_len[x as usize];
        let (mut xi, mut yi) = (x, y);
        for i in 0..len {
            let ok = self.state.add_point(xi, yi);
            self.assigned.push(xi);
            if !ok {
                self.unassign(i as usize + 1);
                return false;
            }
            xi = self.plan.a.apply(xi);
            yi = self.plan.b.apply(yi);
        }
        true
    }

    fn unassign(&mut self, count: usize) {
        for _ in 0..count {
            let x = self.assigned.pop().expect("assigned point");
            self.state.remove_point(x);
        }
    }

    fn expired(&mut self) -> bool {
        if !self.timed_out && self.nodes % 256 == 0 {
            if let Some(d) = self.deadline {
                self.timed_out = Instant::now() >= d;
            }
        }
        self.timed_out
    }

    fn next_val(&mut self, depth: usize, visit: &mut dyn FnMut(&SearchState) -> ControlFlow<()>) -> ControlFlow<()> {
        self.nodes += 1;
        self.max_depth = self.max_depth.max(depth);
        if depth == self.plan.order.len() {
            debug_assert!(self.state.is_complete());
            return visit(&self.state);
        }
        if self.expired() {
            return ControlFlow::Break(());
        }
        let x = self.plan.order[depth];
        let len = self.plan.orbit_len[x as usize] as usize;
        let size = 1u32 << self.plan.n;
        for i in 0..size {
            let y = match &self.orders {
                Some(o) => o[depth][i as usize],
                None => i,
            };
            if !self.plan.closes(x, y) || !self.assign_orbit(x, y) {
                continue;
            }
            let alive = self.pruner.map_or(true, |p| p.is_minimal(&self.state, &self.assigned));
            let flow = if alive { self.next_val(depth + 1, visit) } else { ControlFlow::Continue(()) };
            self.unassign(len);
            flow?;
        }
        ControlFlow::Continue(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct LeOptions {
    /// Wall-clock budget per restart.
    pub budget: Option<Duration>,
    pub max_restarts: usize,
    /// Randomize the bases behind the fixed-space isomorphisms.
    pub randomize_basis: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeOutcome {
    Found { f: Vbf, seed_id: Option<usize>, restarts: usize },
    Timeout { restarts: usize },
    /// The tree is empty for every seed choice.
    Exhausted,
}

fn seed_bases<R: Rng + ?Sized>(plan: &OrbitPlan, randomize: bool, rng: &mut R) -> (Subspace, Subspace) {
    let k = plan.fix_a.dim();
    if !randomize || k == 0 {
        return (plan.fix_a.clone(), plan.fix_b.clone());
    }
    let remap = |s: &Subspace, rng: &mut R| {
        let r = BitMatrix::random_invertible(k, rng);
        Subspace::from_basis(s.n(), r.rows().iter().map(|&c| s.combine(c)).collect()).expect("independent images")
    };
    (remap(&plan.fix_a, rng), remap(&plan.fix_b, rng))
}

fn seeds_for<'s>(plan: &OrbitPlan, seeds: &'s SeedLibrary) -> Result<Option<&'s [Vbf]>, Error> {
    match plan.seed_dim() {
        None => Ok(None),
        Some(k) => {
            let list = seeds.get(k);
            if list.is_empty() {
                return Err(Error::Precondition(format!("no seed functions for dimension {k}")));
            }
            Ok(Some(list))
        }
    }
}

/// Randomized search with restarts; each restart reshuffles the candidate
/// orders and draws a fresh seed function.
pub fn le_search(plan: &OrbitPlan, seeds: &SeedLibrary, rng_seed: u64, opts: &LeOptions) -> Result<LeOutcome, Error> {
    let seed_list = seeds_for(plan, seeds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let size = 1usize << plan.n;
    let mut exhausted_seeds = BTreeSet::new();
    for attempt in 0..opts.max_restarts.max(1) {
        let orders: Vec<Vec<u32>> = (0..plan.order.len())
            .map(|_| {
                let mut p: Vec<u32> = (0..size as u32).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        let seed_id = seed_list.map(|l| rng.gen_range(0..l.len()));
        let (pa, pb) = seed_bases(plan, opts.randomize_basis, &mut rng);
        let deadline = opts.budget.map(|b| Instant::now() + b);
        let mut walker = Walker::new(plan, Some(orders), None, deadline);
        let seed = seed_list.zip(seed_id).map(|(l, i)| (&pa, &pb, &l[i]));
        let mut found = None;
        if walker.prepare(seed) {
            let _ = walker.next_val(0, &mut |s| {
                found = s.to_vbf();
                ControlFlow::Break(())
            });
        }
        if let Some(f) = found {
            info!("le-search restarts={attempt} seed_id={seed_id:?} nodes={}", walker.nodes);
            return Ok(LeOutcome::Found { f, seed_id, restarts: attempt });
        }
        if walker.timed_out {
            info!("le-search restart={attempt} timeout depth_reached={} nodes={}", walker.max_depth, walker.nodes);
        } else if !opts.randomize_basis {
            exhausted_seeds.insert(seed_id);
            if exhausted_seeds.len() == seed_list.map_or(1, <[Vbf]>::len) {
                return Ok(LeOutcome::Exhausted);
            }
        }
    }
    Ok(LeOutcome::Timeout { restarts: opts.max_restarts.max(1) })
}

#[derive(Clone, Debug)]
pub struct DetOptions {
    pub deadline: Option<Duration>,
    pub prune: bool,
    /// Random centralizer samples added to the powers of A and B.
    pub samples: usize,
    pub cross_pairs: usize,
    pub rng_seed: u64,
    pub max_solutions: Option<usize>,
}

impl Default for DetOptions {
    fn default() -> Self {
        DetOptions { deadline: None, prune: true, samples: 8, cross_pairs: 16, rng_seed: 0, max_solutions: None }
    }
}

#[derive(Clone, Debug)]
pub struct DetResult {
    /// Completed tables with the index of the seed function used.
    pub functions: Vec<(Option<usize>, Vbf)>,
    /// True when every seed's tree was fully explored.
    pub complete: bool,
    pub nodes: u64,
}

/// Natural-order exhaustive search over every seed choice, keeping only
/// branches that are lexicographically minimal under the pruning pairs.
pub fn deterministic_search(plan: &OrbitPlan, seeds: &SeedLibrary, opts: &DetOptions) -> Result<DetResult, Error> {
    let seed_list = seeds_for(plan, seeds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let pruner = opts.prune.then(|| {
        let ca = commuting_set(&plan.a, &plan.fix_a, opts.samples, &mut rng);
        let cb = commuting_set(&plan.b, &plan.fix_b, opts.samples, &mut rng);
        Pruner::new(&ca, &cb, opts.cross_pairs, &mut rng)
    });
    let deadline = opts.deadline.map(|d| Instant::now() + d);
    let ids: Vec<Option<usize>> = match seed_list {
        None => vec![None],
        Some(l) => (0..l.len()).map(Some).collect(),
    };
    let mut functions = Vec::new();
    let mut nodes = 0;
    let mut complete = true;
    for id in ids {
        let mut walker = Walker::new(plan, None, pruner.as_ref(), deadline);
        let seed = id.map(|i| (&plan.fix_a, &plan.fix_b, &seed_list.expect("seeded plan")[i]));
        if !walker.prepare(seed) {
            continue;
        }
        let mut capped = false;
        let _ = walker.next_val(0, &mut |s| {
            functions.push((id, s.to_vbf().expect("complete")));
            if opts.max_solutions.is_some_and(|m| functions.len() >= m) {
                capped = true;
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        nodes += walker.nodes;
        if walker.timed_out || capped {
            complete = false;
            break;
        }
    }
    Ok(DetResult { functions, complete, nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::known::power_map;
    use crate::linalg::GF2Poly;

    #[test]
    fn identity_a_gives_singleton_orbits() {
        let b = BitMatrix::companion(GF2Poly::from_bits(0b111)).unwrap();
        let plan = OrbitPlan::new(BitMatrix::identity(2), b).unwrap();
        assert!(plan.orbits().iter().all(|o| o.len() == 1));
        assert_eq!(plan.position_order(), &[1, 2, 3]);
        // y must be fixed by B, so only 0 is allowed
        assert!(plan.closes(1, 0));
        assert!(!plan.closes(1, 1));
    }

    #[test]
    fn order_three_on_n2() {
        let a = BitMatrix::companion(GF2Poly::from_bits(0b111)).unwrap();
        let plan = OrbitPlan::new(a, a).unwrap();
        let mut lens: Vec<usize> = plan.orbits().iter().map(Vec::len).collect();
        lens.sort_unstable();
        assert_eq!(lens, vec![1, 3]);
        assert_eq!(plan.position_order(), &[1]);
    }

    #[test]
    fn order_three_on_n8_field() {
        let f = Field::with_default_modulus(8).unwrap();
        let z = f.pow(f.primitive(), 85);
        let a = f.mul_matrix(z);
        let plan = OrbitPlan::new(a, a).unwrap();
        let orbits = plan.orbits();
        assert_eq!(orbits.len(), 86);
        assert_eq!(orbits.iter().filter(|o| o.len() == 3).count(), 85);
    }

    #[test]
    fn trivial_class_rejected() {
        assert!(OrbitPlan::new(BitMatrix::identity(3), BitMatrix::identity(3)).is_err());
    }

    #[test]
    fn commuting_set_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let id = BitMatrix::identity(3);
        assert_eq!(commuting_set(&id, &Subspace::full(3), 5, &mut rng), vec![id]);
        let m = BitMatrix::companion(GF2Poly::from_bits(0b111)).unwrap();
        let set = commuting_set(&m, &Subspace::zero(2), 5, &mut rng);
        assert!(set.contains(&m) && set.contains(&m.mul(&m)));
        let a = BitMatrix::block_diag(&[m, BitMatrix::identity(2)]).unwrap();
        let fix = a.fixed_space();
        for c in commuting_set(&a, &fix, 20, &mut rng) {
            assert_eq!(c.mul(&a), a.mul(&c));
            assert!(fix.basis().iter().all(|&v| c.apply(v) == v));
            assert!(c.is_invertible());
        }
    }

    #[test]
    fn builtin_seeds_load() {
        let lib = SeedLibrary::builtin().unwrap();
        assert_eq!(lib.get(1).len(), 1);
        assert_eq!(lib.get(5).len(), 2);
        assert_eq!(lib.get(6).len(), 13);
        assert!(lib.get(7).is_empty());
    }

    #[test]
    fn orbit_rollback_restores_state() {
        let a = BitMatrix::companion(GF2Poly::from_bits(0b1011)).unwrap();
        let plan = OrbitPlan::new(a, a).unwrap();
        let mut w = Walker::new(&plan, None, None, None);
        assert!(w.prepare(None));
        let before = w.state.clone();
        for y in 0..8 {
            if plan.closes(1, y) && w.assign_orbit(1, y) {
                w.unassign(plan.orbit_length(1) as usize);
            }
            assert_eq!(w.state, before);
        }
    }

    #[test]
    fn cube_satisfies_field_constraint() {
        let field = Field::with_default_modulus(5).unwrap();
        let g = field.primitive();
        let plan = OrbitPlan::new(field.mul_matrix(g), field.mul_matrix(field.pow(g, 3))).unwrap();
        assert!(plan.satisfied_by(&power_map(5, 3)));
        let lib = SeedLibrary::builtin().unwrap();
        let opts = LeOptions { budget: Some(Duration::from_secs(5)), max_restarts: 3, randomize_basis: false };
        match le_search(&plan, &lib, 1, &opts).unwrap() {
            LeOutcome::Found { f, .. } => {
                assert!(plan.satisfied_by(&f) && f.is_apn() && f.algebraic_degree() <= 2);
            }
            other => panic!("{other:?}"),
        }
    }
}
