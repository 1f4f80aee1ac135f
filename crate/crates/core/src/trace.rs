//! Execution traces recorded by the simulator.
//!
//! A trace is an ordered list of processor state changes and message
//! send/receive pairs. Metrics are computed by scanning it and the Paje
//! exporter renders it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::Time;
use crate::workstealing::ProcId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProcState {
    Working,
    Idle,
    /// Idle, with granted work already on its way.
    Transferring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MessageKind {
    StealRequest,
    GrantResponse,
    FailResponse,
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MessageKind::StealRequest => "request",
            MessageKind::GrantResponse => "grant",
            MessageKind::FailResponse => "fail",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecordKind {
    StateChange(ProcState),
    MessageSend { msg_id: u64, message: MessageKind },
    MessageRecv { msg_id: u64, message: MessageKind },
}

/// One line of a trace. For messages `proc` is the local end (sender on
/// send, receiver on receive) and `peer` the other end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub time: Time,
    pub kind: RecordKind,
    pub proc: ProcId,
    pub peer: Option<ProcId>,
    pub work_amount: Option<Time>,
}

impl TraceRecord {
    pub fn state(&self) -> Option<ProcState> {
        match self.kind {
            RecordKind::StateChange(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EventTrace {
    pub num_procs: usize,
    pub latency: Time,
    /// Sorted by time; equal times keep emission order.
    pub records: Vec<TraceRecord>,
}

impl EventTrace {
    pub fn new(num_procs: usize, latency: Time) -> Self {
        Self {
            num_procs,
            latency,
            records: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, record: TraceRecord) {
        debug_assert!(self.records.last().is_none_or(|r| r.time <= record.time));
        self.records.push(record);
    }

    pub fn state_changes(&self) -> impl Iterator<Item = (Time, ProcId, ProcState)> + '_ {
        self.records
            .iter()
            .filter_map(|r| r.state().map(|s| (r.time, r.proc, s)))
    }

    /// Number of grant messages sent.
    pub fn grants_sent(&self) -> usize {
        self.records
            .iter()
            .filter(|r| {
                matches!(
                    r.kind,
                    RecordKind::MessageSend {
                        message: MessageKind::GrantResponse,
                        ..
                    }
                )
            })
            .count()
    }

    /// Time at which the last unit of work is executed: the latest
    /// Working -> not-Working transition.
    pub fn makespan(&self) -> Time {
        let mut working = vec![false; self.num_procs];
        let mut last = 0;
        for (t, p, s) in self.state_changes() {
            if working[p] && s != ProcState::Working {
                last = last.max(t);
            }
            working[p] = s == ProcState::Working;
        }
        last
    }
}
