//! The collaborative virtual queue.
//!
//! Every aircraft that becomes ready deposits a virtual plane — a floating
//! push-back clearance slot that identifies the owning airline. While the
//! number of planes out (taxiing plus queued at runways) is at or above the
//! load limit, clearances are withheld; as soon as it drops below, the
//! oldest virtual plane is converted into a clearance for its airline,
//! which then picks the physical aircraft to push back. A disabled queue
//! (no load limit) releases everything immediately and is transparent to
//! operations.

use crate::aircraft::AirlineId;
use crate::airside::graph::NodeId;
use std::collections::VecDeque;

/// A floating push-back clearance slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VirtualPlane {
    pub airline: AirlineId,
    pub virtual_pushback_step: u32,
    /// Creation order; breaks ties among same-step virtual planes.
    pub sequence_id: u64,
}

/// Oldest-first stack of virtual planes plus the planes-out load limit.
#[derive(Clone, Debug)]
pub struct VirtualQueue {
    queue: VecDeque<VirtualPlane>,
    next_sequence: u64,
    /// `None` disables gate holding (infinite limit).
    pub load_limit: Option<u32>,
}

impl VirtualQueue {
    pub fn new(load_limit: Option<u32>) -> Self {
        VirtualQueue {
            queue: VecDeque::new(),
            next_sequence: 0,
            load_limit,
        }
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &VirtualPlane> {
        self.queue.iter()
    }

    /// Stack a virtual plane for an aircraft of `airline` that became ready
    /// at step `now`. The clock is monotone, so appending preserves the
    /// (virtual_pushback_step, sequence_id) ordering.
    pub fn enqueue_virtual(&mut self, airline: AirlineId, now: u32) -> VirtualPlane {
        let vp = VirtualPlane {
            airline,
            virtual_pushback_step: now,
            sequence_id: self.next_sequence,
        };
        self.next_sequence += 1;
        debug_assert!(self
            .queue
            .back()
            .is_none_or(|b| (b.virtual_pushback_step, b.sequence_id)
                < (vp.virtual_pushback_step, vp.sequence_id)));
        self.queue.push_back(vp);
        vp
    }

    /// Convert the oldest virtual plane into a clearance if the system is
    /// below the load limit. Call repeatedly within one step — the caller
    /// must count each released aircraft in `planes_out_total` immediately,
    /// so the limit binds within the step.
    pub fn release_eligible(&mut self, planes_out_total: u32) -> Option<AirlineId> {
        match self.load_limit {
            Some(limit) if planes_out_total >= limit => None,
            _ => self.queue.pop_front().map(|vp| vp.airline),
        }
    }
}

/// Runway chosen for a fresh push-back: the one with the least planes out
/// (queueing or taxiing toward it), ties to the smallest node id. `counts`
/// must be non-empty.
pub fn assign_runway(counts: &[(NodeId, u32)]) -> NodeId {
    counts
        .iter()
        .min_by_key(|(node, count)| (*count, *node))
        .map(|(node, _)| *node)
        .expect("assign_runway requires at least one runway")
}
