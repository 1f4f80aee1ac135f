//! Paje 1.x trace export.
//!
//! Each processor is a container directly under the root. Its state is one
//! of `Working`, `Idle`, `Transferring`; every message becomes a
//! `PajeStartLink`/`PajeEndLink` pair keyed by message id, on link types
//! for steal requests, grants and fails.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::engine::Time;
use crate::error::IoError;
use crate::trace::{EventTrace, MessageKind, ProcState, RecordKind};

const HEADER: &str = "\
%EventDef PajeDefineContainerType 0
% Alias string
% Type string
% Name string
%EndEventDef
%EventDef PajeDefineStateType 1
% Alias string
% Type string
% Name string
%EndEventDef
%EventDef PajeDefineEntityValue 2
% Alias string
% Type string
% Name string
% Color color
%EndEventDef
%EventDef PajeDefineLinkType 3
% Alias string
% Type string
% StartContainerType string
% EndContainerType string
% Name string
%EndEventDef
%EventDef PajeCreateContainer 4
% Time date
% Alias string
% Type string
% Container string
% Name string
%EndEventDef
%EventDef PajeDestroyContainer 5
% Time date
% Type string
% Name string
%EndEventDef
%EventDef PajeSetState 6
% Time date
% Type string
% Container string
% Value string
%EndEventDef
%EventDef PajeStartLink 7
% Time date
% Type string
% Container string
% Value string
% StartContainer string
% Key string
%EndEventDef
%EventDef PajeEndLink 8
% Time date
% Type string
% Container string
% Value string
% EndContainer string
% Key string
%EndEventDef
0 PROC 0 \"Processor\"
1 STATE PROC \"Processor state\"
2 working STATE \"Working\" \"0.0 0.7 0.0\"
2 idle STATE \"Idle\" \"0.8 0.8 0.8\"
2 transferring STATE \"Transferring\" \"0.9 0.6 0.0\"
3 LREQ 0 PROC PROC \"Steal request\"
3 LGRANT 0 PROC PROC \"Work grant\"
3 LFAIL 0 PROC PROC \"Steal fail\"
2 request LREQ \"request\" \"0.2 0.2 0.9\"
2 grant LGRANT \"grant\" \"0.0 0.6 0.0\"
2 fail LFAIL \"fail\" \"0.9 0.1 0.1\"
";

fn state_alias(s: ProcState) -> &'static str {
    match s {
        ProcState::Working => "working",
        ProcState::Idle => "idle",
        ProcState::Transferring => "transferring",
    }
}

fn link_type(m: MessageKind) -> (&'static str, &'static str) {
    match m {
        MessageKind::StealRequest => ("LREQ", "request"),
        MessageKind::GrantResponse => ("LGRANT", "grant"),
        MessageKind::FailResponse => ("LFAIL", "fail"),
    }
}

/// Checks that every send has exactly one receive `latency` later.
fn check_links(trace: &EventTrace, latency: Time) -> Result<(), IoError> {
    let mut open: HashMap<u64, (Time, MessageKind)> = HashMap::new();
    for r in &trace.records {
        match r.kind {
            RecordKind::MessageSend { msg_id, message } => {
                open.insert(msg_id, (r.time, message));
            }
            RecordKind::MessageRecv { msg_id, message } => {
                let (sent, _) = open.remove(&msg_id).ok_or(IoError::UnpairedMessage {
                    id: msg_id,
                    kind: message.to_string(),
                    missing: "send",
                })?;
                if r.time - sent != latency {
                    return Err(IoError::LinkDuration {
                        id: msg_id,
                        duration: r.time - sent,
                        latency,
                    });
                }
            }
            RecordKind::StateChange(_) => {}
        }
    }
    match open.into_iter().min_by_key(|(id, _)| *id) {
        Some((id, (_, kind))) => Err(IoError::UnpairedMessage {
            id,
            kind: kind.to_string(),
            missing: "receive",
        }),
        None => Ok(()),
    }
}

/// Renders `trace` as a Paje document into `out`.
pub fn write_paje<W: Write>(trace: &EventTrace, latency: Time, mut out: W) -> Result<(), IoError> {
    check_links(trace, latency)?;
    let io = |source| IoError::Io {
        path: "<paje output>".into(),
        source,
    };
    render(trace, &mut out).map_err(io)
}

fn render<W: Write>(trace: &EventTrace, out: &mut W) -> io::Result<()> {
    out.write_all(HEADER.as_bytes())?;
    for p in 0..trace.num_procs {
        writeln!(out, "4 0 p{p} PROC 0 \"P{p}\"")?;
    }
    for p in 0..trace.num_procs {
        writeln!(out, "6 0 STATE p{p} idle")?;
    }
    let mut end = 0;
    for r in &trace.records {
        end = r.time;
        match r.kind {
            RecordKind::StateChange(s) => writeln!(out, "6 {} STATE p{} {}", r.time, r.proc, state_alias(s))?,
            RecordKind::MessageSend { msg_id, message } => {
                let (ty, value) = link_type(message);
                writeln!(out, "7 {} {ty} 0 {value} p{} m{msg_id}", r.time, r.proc)?
            }
            RecordKind::MessageRecv { msg_id, message } => {
                let (ty, value) = link_type(message);
                writeln!(out, "8 {} {ty} 0 {value} p{} m{msg_id}", r.time, r.proc)?
            }
        }
    }
    for p in 0..trace.num_procs {
        writeln!(out, "5 {end} PROC p{p}")?;
    }
    out.flush()
}

pub fn export_paje(trace: &EventTrace, latency: Time, path: &Path) -> Result<(), IoError> {
    let file = File::create(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut buf = Vec::new();
    write_paje(trace, latency, &mut buf)?;
    let mut out = BufWriter::new(file);
    out.write_all(&buf)
        .and_then(|_| out.flush())
        .map_err(|source| IoError::Io {
            path: path.to_path_buf(),
            source,
        })
}
