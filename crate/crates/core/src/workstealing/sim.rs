use serde::{Deserialize, Serialize};

use super::{split_work, ProcId, ResponsePolicy, SimConfig, VictimSelector};
use crate::engine::{EventHandle, EventQueue, Time};
use crate::error::ConfigError;
use crate::metrics::{self, SimResult};
use crate::trace::{EventTrace, MessageKind, ProcState, RecordKind, TraceRecord};

/// A message in flight. Every message arrives exactly `latency` after it was sent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub id: u64,
    pub kind: MessageKind,
    pub from: ProcId,
    pub to: ProcId,
    /// Nonzero only for grants.
    pub work_amount: Time,
    pub send_time: Time,
    pub arrival_time: Time,
}

#[derive(Debug, Clone)]
enum SimEvent {
    Arrival(Message),
    Completion(ProcId),
}

/// Per-processor bookkeeping. The local task queue collapses to a single
/// scalar because the load is divisible: while busy, the processor is
/// executing a segment that started at `segment_start` and ends at `busy_until`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessorState {
    pub id: ProcId,
    pub busy_until: Option<Time>,
    pub segment_start: Time,
    pub request_outstanding: bool,
    /// Only ever set under SWT: end of the current outgoing transfer.
    pub transfer_busy_until: Option<Time>,
    pub ever_active: bool,
    /// Work executed in finished segments.
    pub busy_time_total: Time,
}

impl ProcessorState {
    fn new(id: ProcId) -> Self {
        Self {
            id,
            busy_until: None,
            segment_start: 0,
            request_outstanding: false,
            transfer_busy_until: None,
            ever_active: false,
            busy_time_total: 0,
        }
    }

    pub fn remaining_work(&self, now: Time) -> Time {
        self.busy_until.map_or(0, |end| end.saturating_sub(now))
    }

    /// Work executed up to `now`, including the running segment.
    pub fn executed(&self, now: Time) -> Time {
        let running = match self.busy_until {
            Some(end) => now.min(end) - self.segment_start,
            None => 0,
        };
        self.busy_time_total + running
    }
}

/// One work stealing run, driven event by event.
///
/// A steal request arriving at time `t` is answered against the victim's
/// remaining work `w` at `t`:
///
/// 1. `w < 2` (nothing to split): fail;
/// 2. threshold enabled and `w < threshold_value`: fail;
/// 3. SWT and a previous grant still in transit: fail;
/// 4. otherwise grant `floor(w/2)` and keep `ceil(w/2)`.
///
/// Fails cost a full latency and the thief immediately retries with a fresh
/// victim draw. The run ends when no processor holds work and no grant is in
/// flight; outstanding requests are then drained without retries.
pub struct Simulation {
    config: SimConfig,
    queue: EventQueue<SimEvent>,
    procs: Vec<ProcessorState>,
    completions: Vec<Option<EventHandle>>,
    selector: VictimSelector,
    trace: EventTrace,
    busy_procs: usize,
    in_flight_work: Time,
    /// Messages in flight per thief (its request or the answer to it).
    in_flight_per_thief: Vec<u32>,
    next_msg_id: u64,
    requests_total: u64,
    requests_granted: u64,
    requests_failed: u64,
    makespan: Time,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let p = config.num_procs;
        let mut sim = Self {
            queue: EventQueue::new(),
            procs: (0..p).map(ProcessorState::new).collect(),
            completions: vec![None; p],
            selector: VictimSelector::new(config.seed, p, &config.victim_script),
            trace: EventTrace::new(p, config.latency),
            busy_procs: 0,
            in_flight_work: 0,
            in_flight_per_thief: vec![0; p],
            next_msg_id: 0,
            requests_total: 0,
            requests_granted: 0,
            requests_failed: 0,
            makespan: 0,
            config,
        };
        sim.start_segment(0, 0, sim.config.total_work);
        for id in 1..p {
            sim.record_state(0, id, ProcState::Idle);
        }
        for id in 1..p {
            sim.send_request(id, 0);
        }
        Ok(sim)
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn now(&self) -> Time {
        self.queue.clock()
    }

    pub fn processors(&self) -> &[ProcessorState] {
        &self.procs
    }

    pub fn trace(&self) -> &EventTrace {
        &self.trace
    }

    /// Remaining work of every processor at the current clock.
    pub fn remaining_work(&self) -> Vec<Time> {
        let now = self.now();
        self.procs.iter().map(|p| p.remaining_work(now)).collect()
    }

    pub fn in_flight_work(&self) -> Time {
        self.in_flight_work
    }

    /// No work left anywhere: nothing held, nothing in transit.
    pub fn work_done(&self) -> bool {
        self.busy_procs == 0 && self.in_flight_work == 0
    }

    /// Processes one event and returns its time, or `None` once drained.
    pub fn step(&mut self) -> Option<Time> {
        let event = self.queue.next_event()?;
        let t = event.time;
        match event.payload {
            SimEvent::Completion(id) => self.on_completion(id, t),
            SimEvent::Arrival(msg) => match msg.kind {
                MessageKind::StealRequest => self.on_request_arrival(msg, t),
                MessageKind::GrantResponse | MessageKind::FailResponse => self.on_response_arrival(msg, t),
            },
        }
        Some(t)
    }

    /// Processes every event scheduled at or before `t`.
    pub fn run_until(&mut self, t: Time) {
        while self.queue.peek_time().is_some_and(|next| next <= t) {
            self.step();
        }
    }

    pub fn run(mut self) -> (SimResult, EventTrace) {
        while self.step().is_some() {}
        self.finish()
    }

    fn finish(self) -> (SimResult, EventTrace) {
        debug_assert!(self.work_done());
        let makespan = self.makespan;
        let busy_time: Vec<Time> = self.procs.iter().map(|p| p.busy_time_total).collect();
        let idle_time = busy_time.iter().map(|b| makespan - b).collect();
        let startup_end = metrics::detect_startup_end(&self.trace);
        let shutdown_start = metrics::detect_shutdown_start(&self.trace);
        let result = SimResult {
            makespan,
            requests_total: self.requests_total,
            requests_granted: self.requests_granted,
            requests_failed: self.requests_failed,
            startup_end,
            shutdown_start,
            busy_time,
            idle_time,
            seed: self.config.seed,
            config: self.config,
        };
        (result, self.trace)
    }

    /// Checks the conservation and protocol invariants at the current clock.
    pub fn check_invariants(&self) -> Result<(), String> {
        let now = self.now();
        let held: Time = self.procs.iter().map(|p| p.remaining_work(now)).sum();
        let executed: Time = self.procs.iter().map(|p| p.executed(now)).sum();
        if held + self.in_flight_work + executed != self.config.total_work {
            return Err(format!(
                "t={now}: held {held} + in flight {} + executed {executed} != W={}",
                self.in_flight_work, self.config.total_work
            ));
        }
        for (p, &inflight) in self.procs.iter().zip(&self.in_flight_per_thief) {
            if inflight > 1 {
                return Err(format!("t={now}: P{} has {inflight} outstanding steals", p.id));
            }
            if p.request_outstanding && p.remaining_work(now) > 0 {
                return Err(format!("t={now}: P{} steals while holding work", p.id));
            }
            if p.request_outstanding != (inflight == 1) {
                return Err(format!("t={now}: P{} request flag out of sync", p.id));
            }
            if self.config.policy == ResponsePolicy::Mwt && p.transfer_busy_until.is_some() {
                return Err(format!("t={now}: P{} has a transfer channel under MWT", p.id));
            }
            if p.busy_until.is_some() != self.completions[p.id].is_some() {
                return Err(format!("t={now}: P{} completion event out of sync", p.id));
            }
        }
        if self.requests_granted + self.requests_failed > self.requests_total {
            return Err(format!("t={now}: more answers than requests"));
        }
        Ok(())
    }

    fn on_completion(&mut self, id: ProcId, t: Time) {
        let proc = &mut self.procs[id];
        debug_assert_eq!(proc.busy_until, Some(t));
        proc.busy_time_total += t - proc.segment_start;
        proc.busy_until = None;
        self.completions[id] = None;
        self.busy_procs -= 1;
        self.makespan = self.makespan.max(t);
        self.record_state(t, id, ProcState::Idle);
        if !self.work_done() {
            self.send_request(id, t);
        }
    }

    fn on_request_arrival(&mut self, msg: Message, t: Time) {
        self.record_message(t, msg, false);
        let (victim, thief) = (msg.to, msg.from);
        let latency = self.config.latency;
        let proc = &self.procs[victim];
        let w = proc.remaining_work(t);
        let refuse = w < 2
            || (self.config.threshold_enabled && w < self.config.threshold_value)
            || (self.config.policy == ResponsePolicy::Swt && proc.transfer_busy_until.is_some_and(|end| end > t));
        if refuse {
            self.requests_failed += 1;
            self.send(MessageKind::FailResponse, victim, thief, 0, t);
            return;
        }

        let (kept, sent) = split_work(w);
        let end = t + kept;
        let proc = &mut self.procs[victim];
        proc.busy_until = Some(end);
        if self.config.policy == ResponsePolicy::Swt {
            proc.transfer_busy_until = Some(t + latency);
        }
        if let Some(old) = self.completions[victim].take() {
            self.queue.cancel(old);
        }
        self.completions[victim] = Some(self.queue.schedule(end, SimEvent::Completion(victim)));
        self.in_flight_work += sent;
        self.requests_granted += 1;
        self.send(MessageKind::GrantResponse, victim, thief, sent, t);
        self.record_state(t, thief, ProcState::Transferring);
    }

    fn on_response_arrival(&mut self, msg: Message, t: Time) {
        let thief = msg.to;
        let proc = &self.procs[thief];
        assert!(
            proc.request_outstanding && proc.busy_until.is_none(),
            "protocol corruption: P{thief} got a response at t={t} without an outstanding request"
        );
        self.record_message(t, msg, false);
        self.procs[thief].request_outstanding = false;
        self.in_flight_per_thief[thief] -= 1;
        match msg.kind {
            MessageKind::GrantResponse => {
                assert!(msg.work_amount >= 1, "protocol corruption: empty grant to P{thief}");
                self.in_flight_work -= msg.work_amount;
                self.start_segment(t, thief, msg.work_amount);
            }
            _ => {
                if !self.work_done() {
                    self.send_request(thief, t);
                }
            }
        }
    }

    fn start_segment(&mut self, t: Time, id: ProcId, work: Time) {
        let proc = &mut self.procs[id];
        proc.segment_start = t;
        proc.busy_until = Some(t + work);
        proc.ever_active = true;
        self.completions[id] = Some(self.queue.schedule(t + work, SimEvent::Completion(id)));
        self.busy_procs += 1;
        self.record_state(t, id, ProcState::Working);
    }

    fn send_request(&mut self, thief: ProcId, t: Time) {
        let Ok(victim) = self.selector.choose_victim(thief) else {
            return;
        };
        let proc = &mut self.procs[thief];
        assert!(!proc.request_outstanding, "P{thief} already has a steal in progress");
        proc.request_outstanding = true;
        self.in_flight_per_thief[thief] += 1;
        self.requests_total += 1;
        self.send(MessageKind::StealRequest, thief, victim, 0, t);
    }

    fn send(&mut self, kind: MessageKind, from: ProcId, to: ProcId, work_amount: Time, t: Time) {
        let msg = Message {
            id: self.next_msg_id,
            kind,
            from,
            to,
            work_amount,
            send_time: t,
            arrival_time: t + self.config.latency,
        };
        self.next_msg_id += 1;
        self.record_message(t, msg, true);
        self.queue.schedule(msg.arrival_time, SimEvent::Arrival(msg));
    }

    fn record_state(&mut self, t: Time, id: ProcId, state: ProcState) {
        self.trace.push(TraceRecord {
            time: t,
            kind: RecordKind::StateChange(state),
            proc: id,
            peer: None,
            work_amount: None,
        });
    }

    fn record_message(&mut self, t: Time, msg: Message, outgoing: bool) {
        let (kind, proc, peer) = if outgoing {
            (
                RecordKind::MessageSend {
                    msg_id: msg.id,
                    message: msg.kind,
                },
                msg.from,
                msg.to,
            )
        } else {
            (
                RecordKind::MessageRecv {
                    msg_id: msg.id,
                    message: msg.kind,
                },
                msg.to,
                msg.from,
            )
        };
        self.trace.push(TraceRecord {
            time: t,
            kind,
            proc,
            peer: Some(peer),
            work_amount: (msg.kind == MessageKind::GrantResponse).then_some(msg.work_amount),
        });
    }
}

/// Runs `config` to completion.
pub fn run_simulation(config: SimConfig) -> Result<(SimResult, EventTrace), ConfigError> {
    Ok(Simulation::new(config)?.run())
}
