//! Randomized recursive tree search for APN functions of algebraic degree at
//! most two.
//!
//! The lookup table is filled one position at a time. Each assignment updates
//! a partial DDT and, for every cube `u` of weight >= 3 containing the
//! position, a counter of defined points and the running XOR of their
//! values. A branch is abandoned as soon as some DDT entry in a nonzero row
//! exceeds 2, or some cube is complete with a nonzero Moebius sum (an ANF
//! monomial of degree >= 3).

use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use log::{debug, info};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::boolfun::Vbf;
use crate::error::Error;

pub const UNDEFINED: u32 = u32::MAX;

/// Partial lookup table plus the incremental bookkeeping used for pruning.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchState {
    n: usize,
    sbox: Vec<u32>,
    defined: Vec<u32>,
    slot: Vec<u32>,
    ddt: Vec<u8>,
    ctr: Vec<u16>,
    sum: Vec<u32>,
}

impl SearchState {
    pub fn new(n: usize) -> Result<Self, Error> {
        if !(1..=12).contains(&n) {
            return Err(Error::InvalidArgument(format!("search dimension {n} out of range")));
        }
        let size = 1usize << n;
        Ok(SearchState {
            n,
            sbox: vec![UNDEFINED; size],
            defined: Vec::with_capacity(size),
            slot: vec![u32::MAX; size],
            ddt: vec![0; size * size],
            ctr: vec![0; size],
            sum: vec![0; size],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        1 << self.n
    }

    pub fn value(&self, x: u32) -> Option<u32> {
        let v = self.sbox[x as usize];
        (v != UNDEFINED).then_some(v)
    }

    pub fn sbox(&self) -> &[u32] {
        &self.sbox
    }

    pub fn defined_count(&self) -> usize {
        self.defined.len()
    }

    pub fn is_complete(&self) -> bool {
        self.defined.len() == self.size()
    }

    /// Smallest undefined position, if any.
    pub fn next_free_position(&self) -> Option<u32> {
        self.sbox.iter().position(|&v| v == UNDEFINED).map(|p| p as u32)
    }

    pub fn ddt_counter(&self, alpha: u32, beta: u32) -> u8 {
        self.ddt[((alpha as usize) << self.n) | beta as usize]
    }

    pub fn ctr(&self) -> &[u16] {
        &self.ctr
    }

    pub fn sum(&self) -> &[u32] {
        &self.sum
    }

    pub fn ddt_counters(&self) -> &[u8] {
        &self.ddt
    }

    /// Writes `sbox[x] = y` without touching the bookkeeping.
    pub fn set_value(&mut self, x: u32, y: u32) {
        debug_assert!(y < self.size() as u32);
        let xi = x as usize;
        if self.sbox[xi] == UNDEFINED {
            self.slot[xi] = self.defined.len() as u32;
            self.defined.push(x);
        }
        self.sbox[xi] = y;
    }

    /// Resets `sbox[x]` to undefined without touching the bookkeeping.
    pub fn clear_value(&mut self, x: u32) {
        let xi = x as usize;
        if self.sbox[xi] == UNDEFINED {
            return;
        }
        let s = self.slot[xi] as usize;
        self.defined.swap_remove(s);
        if let Some(&moved) = self.defined.get(s) {
            self.slot[moved as usize] = s as u32;
        }
        self.slot[xi] = u32::MAX;
        self.sbox[xi] = UNDEFINED;
    }

    /// Adds 2 to the DDT entry of every pair `{x, x'}` with `x'` defined.
    /// Returns false if some touched entry now exceeds 2; the update is
    /// applied in full either way.
    pub fn add_ddt_information(&mut self, x: u32) -> bool {
        let y = self.sbox[x as usize];
        debug_assert_ne!(y, UNDEFINED);
        let n = self.n;
        let mut ok = true;
        for &x2 in &self.defined {
            if x2 == x {
                continue;
            }
            let idx = (((x ^ x2) as usize) << n) | (y ^ self.sbox[x2 as usize]) as usize;
            let e = &mut self.ddt[idx];
            *e += 2;
            ok &= *e <= 2;
        }
        ok
    }

    /// Undoes [`SearchState::add_ddt_information`]. Returns false if some
    /// touched entry exceeded 2 before the removal.
    pub fn remove_ddt_information(&mut self, x: u32) -> bool {
        let y = self.sbox[x as usize];
        debug_assert_ne!(y, UNDEFINED);
        let n = self.n;
        let mut ok = true;
        for &x2 in &self.defined {
            if x2 == x {
                continue;
            }
            let idx = (((x ^ x2) as usize) << n) | (y ^ self.sbox[x2 as usize]) as usize;
            let e = &mut self.ddt[idx];
            ok &= *e <= 2;
            *e -= 2;
        }
        ok
    }

    /// Updates `ctr[u]` and `sum[u]` for every `u >= x` of weight >= 3.
    /// Returns false if a cube becomes complete with a nonzero sum.
    pub fn add_degree_information(&mut self, x: u32) -> bool {
        let y = self.sbox[x as usize];
        debug_assert_ne!(y, UNDEFINED);
        let mut ok = true;
        for_supersets(x, self.n, |u| {
            let ui = u as usize;
            self.ctr[ui] += 1;
            self.sum[ui] ^= y;
            if self.ctr[ui] as u32 == 1 << u.count_ones() && self.sum[ui] != 0 {
                ok = false;
            }
        });
        ok
    }

    /// Undoes [`SearchState::add_degree_information`]. Returns false if a
    /// cube was complete with a nonzero sum before the removal.
    pub fn remove_degree_information(&mut self, x: u32) -> bool {
        let y = self.sbox[x as usize];
        debug_assert_ne!(y, UNDEFINED);
        let mut ok = true;
        for_supersets(x, self.n, |u| {
            let ui = u as usize;
            self.ctr[ui] -= 1;
            self.sum[ui] ^= y;
            if self.ctr[ui] as u32 == (1 << u.count_ones()) - 1 && self.sum[ui] != y {
                ok = false;
            }
        });
        ok
    }

    /// Sets `sbox[x] = y` and runs both checks; the degree bookkeeping is only
    /// updated when the DDT check passes. Returns whether the branch is alive.
    pub fn add_point(&mut self, x: u32, y: u32) -> bool {
        self.set_value(x, y);
        if self.add_ddt_information(x) {
            self.add_degree_information(x)
        } else {
            false
        }
    }

    /// Exact inverse of [`SearchState::add_point`].
    pub fn remove_point(&mut self, x: u32) {
        if self.remove_ddt_information(x) {
            self.remove_degree_information(x);
        }
        self.clear_value(x);
    }

    pub fn to_vbf(&self) -> Option<Vbf> {
        if !self.is_complete() {
            return None;
        }
        Some(Vbf::new(self.n, self.sbox.clone()).expect("complete table"))
    }

    /// Recomputes the DDT counters and Moebius partial sums from scratch,
    /// for checking the incremental bookkeeping.
    pub fn recompute(&self) -> (Vec<u8>, Vec<u16>, Vec<u32>) {
        let size = self.size();
        let mut ddt = vec![0u8; size * size];
        for x in 0..size {
            for x2 in 0..size {
                if x == x2 || self.sbox[x] == UNDEFINED || self.sbox[x2] == UNDEFINED {
                    continue;
                }
                ddt[((x ^ x2) << self.n) | (self.sbox[x] ^ self.sbox[x2]) as usize] += 1;
            }
        }
        let mut ctr = vec![0u16; size];
        let mut sum = vec![0u32; size];
        for u in 0..size {
            if u.count_ones() < 3 {
                continue;
            }
            for x in 0..size {
                if x & !u == 0 && self.sbox[x] != UNDEFINED {
                    ctr[u] += 1;
                    sum[u] ^= self.sbox[x];
                }
            }
        }
        (ddt, ctr, sum)
    }
}

/// Calls `f(u)` for every `u` containing `x` with `wt(u) >= 3`, walking the
/// submasks of the complement of `x`.
#[inline]
fn for_supersets(x: u32, n: usize, mut f: impl FnMut(u32)) {
    let comp = !x & ((1u32 << n) - 1);
    let mut s = comp;
    loop {
        let u = x | s;
        if u.count_ones() >= 3 {
            f(u);
        }
        if s == 0 {
            break;
        }
        s = (s - 1) & comp;
    }
}

/// Result of one search attempt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Vbf),
    Timeout { max_depth: usize, nodes: u64 },
    /// The whole tree was explored without a solution.
    Exhausted { nodes: u64 },
}

/// Default restart budget per dimension.
pub fn default_budget(n: usize) -> Duration {
    match n {
        0..=6 => Duration::from_secs(1),
        7 => Duration::from_secs(10),
        _ => Duration::from_secs(60),
    }
}

struct Walker<'a> {
    state: SearchState,
    orders: &'a [Vec<u32>],
    pinned: &'a [u32],
    deadline: Option<Instant>,
    nodes: u64,
    max_depth: usize,
    timed_out: bool,
}

impl Walker<'_> {
    fn expired(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        if self.nodes % 1024 == 0 {
            if let Some(d) = self.deadline {
                self.timed_out = Instant::now() >= d;
            }
        }
        self.timed_out
    }

    fn next_val(
        &mut self,
        depth: usize,
        visit: &mut dyn FnMut(&SearchState) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        self.nodes += 1;
        self.max_depth = self.max_depth.max(depth);
        if self.state.is_complete() {
            return visit(&self.state);
        }
        if self.expired() {
            return ControlFlow::Break(());
        }
        let x = self.state.next_free_position().expect("incomplete table");
        let pinned = self.pinned[x as usize];
        let single = [pinned];
        let candidates: &[u32] = if pinned != UNDEFINED { &single } else { &self.orders[depth] };
        for &y in candidates {
            let alive = self.state.add_point(x, y);
            let flow = if alive { self.next_val(depth + 1, visit) } else { ControlFlow::Continue(()) };
            self.state.remove_point(x);
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// One attempt of the randomized search: `F(0) = 0`, then positions in
/// increasing order with the candidate values at each depth taken from an
/// independent shuffle of `0..2^n`.
pub fn search(n: usize, rng: &mut ChaCha8Rng, budget: Option<Duration>) -> Result<SearchOutcome, Error> {
    if !(2..=10).contains(&n) {
        return Err(Error::InvalidArgument(format!("search needs 2 <= n <= 10, got {n}")));
    }
    let size = 1usize << n;
    let orders: Vec<Vec<u32>> = (0..size)
        .map(|_| {
            let mut p: Vec<u32> = (0..size as u32).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    let pinned = vec![UNDEFINED; size];
    let mut found = None;
    let outcome = walk(n, &orders, &pinned, budget, &mut |s| {
        found = s.to_vbf();
        ControlFlow::Break(())
    })?;
    Ok(match found {
        Some(f) => SearchOutcome::Found(f),
        None => outcome,
    })
}

/// Repeats [`search`] with fresh shuffles until a function is found or
/// `max_restarts` attempts have timed out.
pub fn search_with_restarts(
    n: usize,
    seed: u64,
    budget: Duration,
    max_restarts: usize,
) -> Result<Option<(Vbf, usize)>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..max_restarts.max(1) {
        match search(n, &mut rng, Some(budget))? {
            SearchOutcome::Found(f) => {
                info!("search n={n} seed={seed} restarts={attempt} found");
                return Ok(Some((f, attempt)));
            }
            SearchOutcome::Timeout { max_depth, nodes } => {
                info!("search n={n} seed={seed} restart={attempt} timeout depth_reached={max_depth} nodes={nodes}");
            }
            SearchOutcome::Exhausted { nodes } => {
                debug!("search n={n} seed={seed} exhausted after {nodes} nodes");
                return Ok(None);
            }
        }
    }
    Ok(None)
}

/// Deterministic exhaustive walk in natural candidate order, calling `visit`
/// on every completed table. `pinned[x]`, when not [`UNDEFINED`], restricts
/// position `x` to that single value. `F(0) = 0` is always fixed.
pub fn enumerate(
    n: usize,
    pinned: &[u32],
    visit: &mut dyn FnMut(&Vbf) -> ControlFlow<()>,
) -> Result<SearchOutcome, Error> {
    let size = 1usize << n;
    if pinned.len() != size {
        return Err(Error::InvalidArgument("pinned table has the wrong length".into()));
    }
    let natural: Vec<u32> = (0..size as u32).collect();
    let orders = vec![natural; size];
    walk(n, &orders, pinned, None, &mut |s| visit(&s.to_vbf().expect("complete")))
}

fn walk(
    n: usize,
    orders: &[Vec<u32>],
    pinned: &[u32],
    budget: Option<Duration>,
    visit: &mut dyn FnMut(&SearchState) -> ControlFlow<()>,
) -> Result<SearchOutcome, Error> {
    let mut walker = Walker {
        state: SearchState::new(n)?,
        orders,
        pinned,
        deadline: budget.map(|b| Instant::now() + b),
        nodes: 0,
        max_depth: 0,
        timed_out: false,
    };
    // F(0) = 0 before the recursion starts
    walker.state.add_point(0, 0);
    let _ = walker.next_val(1, visit);
    Ok(if walker.timed_out {
        SearchOutcome::Timeout { max_depth: walker.max_depth, nodes: walker.nodes }
    } else {
        SearchOutcome::Exhausted { nodes: walker.nodes }
    })
}
