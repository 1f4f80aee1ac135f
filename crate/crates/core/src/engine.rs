//! Discrete-event core: a virtual clock and a time-ordered event queue.
//!
//! Events pop in `(time, seq)` order, where `seq` is the insertion counter, so
//! simultaneous events fire in the order they were scheduled. Cancelled events
//! stay in the heap and are dropped when they reach the front.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

/// Simulated time, in work units.
pub type Time = u64;

/// A scheduled occurrence carrying a caller-defined payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event<P> {
    pub time: Time,
    pub seq: u64,
    pub payload: P,
}

/// Handle returned by [`EventQueue::schedule`], used to cancel an event later.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EventHandle(u64);

impl EventHandle {
    pub fn seq(self) -> u64 {
        self.0
    }
}

struct Entry<P>(Event<P>);

impl<P> PartialEq for Entry<P> {
    fn eq(&self, other: &Self) -> bool {
        self.0.seq == other.0.seq
    }
}

impl<P> Eq for Entry<P> {}

impl<P> PartialOrd for Entry<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<P> Ord for Entry<P> {
    // BinaryHeap is a max-heap; reverse so the smallest (time, seq) is on top.
    fn cmp(&self, other: &Self) -> Ordering {
        (other.0.time, other.0.seq).cmp(&(self.0.time, self.0.seq))
    }
}

pub struct EventQueue<P> {
    pending: BinaryHeap<Entry<P>>,
    cancelled: HashSet<u64>,
    clock: Time,
    next_seq: u64,
}

impl<P> Default for EventQueue<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> EventQueue<P> {
    pub fn new() -> Self {
        Self {
            pending: BinaryHeap::new(),
            cancelled: HashSet::new(),
            clock: 0,
            next_seq: 0,
        }
    }

    /// Current virtual time: the timestamp of the last popped event.
    pub fn clock(&self) -> Time {
        self.clock
    }

    /// Schedules `payload` at `time`.
    ///
    /// # Panics
    ///
    /// If `time` is earlier than the clock. Scheduling in the past is a logic
    /// error in the caller and is never silently reordered.
    pub fn schedule(&mut self, time: Time, payload: P) -> EventHandle {
        assert!(
            time >= self.clock,
            "event scheduled in the past: t={time} < clock={}",
            self.clock
        );
        let seq = self.next_seq;
        self.next_seq += 1;
        self.pending.push(Entry(Event { time, seq, payload }));
        EventHandle(seq)
    }

    /// Marks a scheduled event so that it is skipped instead of delivered.
    /// Cancelling an event that already fired has no effect.
    pub fn cancel(&mut self, handle: EventHandle) {
        if handle.0 < self.next_seq {
            self.cancelled.insert(handle.0);
        }
    }

    /// Pops the earliest live event and advances the clock to its time.
    pub fn next_event(&mut self) -> Option<Event<P>> {
        while let Some(Entry(event)) = self.pending.pop() {
            if self.cancelled.remove(&event.seq) {
                continue;
            }
            debug_assert!(event.time >= self.clock);
            self.clock = event.time;
            return Some(event);
        }
        self.cancelled.clear();
        None
    }

    /// Timestamp of the earliest live event without popping it.
    pub fn peek_time(&mut self) -> Option<Time> {
        while let Some(Entry(event)) = self.pending.peek() {
            if self.cancelled.contains(&event.seq) {
                let seq = event.seq;
                self.pending.pop();
                self.cancelled.remove(&seq);
                continue;
            }
            return Some(event.time);
        }
        None
    }

    /// True when no live event remains.
    pub fn is_exhausted(&mut self) -> bool {
        self.peek_time().is_none()
    }
}
