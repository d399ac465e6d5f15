//! Decision procedures: the bounded-ring tester, its consistency checks and
//! the ring-decomposition tester for arbitrary rotation-invariant inputs.

mod config;
mod consistency;
mod group;
mod pivot;
mod ri;
mod rings;
mod simple;
mod threshold;
mod verdict;

pub use config::{threshold_check_budget, TRule, TesterConfig};
pub use consistency::{check_consistency, check_consistency_from};
pub use group::{consistency_group, GroupResult};
pub use pivot::{find_pivot, find_pivot_from, pivot_budget};
pub use ri::{ri_plan, ri_tester, ri_tester_live, RiPlan};
pub use rings::{
    allocate_rings, outer_map, rescale_outer, ring_count, ring_count_covering, Region,
    RingAllocator, RingDecomposition, RingLayout,
};
pub use simple::{simple_tester, simple_tester_from};
pub use threshold::{check_threshold, check_threshold_samples, threshold_interval};
pub use verdict::{
    real, CenterDiag, ConsistencyDiag, Decision, Diagnostics, PairDiag, PivotDiag, Reason, RiDiag,
    RingDiag, SimpleDiag, TesterVerdict, ThresholdDiag, SCHEMA_VERSION,
};

use crate::sampling::SampleSource;

/// Rewinds a source between simulated subroutines and remembers the longest
/// prefix any of them read.
pub(crate) struct Replay<'s, S: SampleSource + ?Sized> {
    src: &'s mut S,
    peak: u64,
}

impl<'s, S: SampleSource + ?Sized> Replay<'s, S> {
    pub(crate) fn new(src: &'s mut S) -> Self {
        let peak = src.drawn();
        Self { src, peak }
    }

    pub(crate) fn rewind(&mut self) -> &mut S {
        self.peak = self.peak.max(self.src.drawn());
        self.src.restart();
        self.src
    }

    pub(crate) fn peak(&self) -> u64 {
        self.peak.max(self.src.drawn())
    }
}
