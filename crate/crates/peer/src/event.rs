//! Ordered event log of everything a peer does; the primary test oracle.

use bpplab_proto::msg::Message;
use bpplab_proto::packet::CorruptReason;
use bpplab_proto::Direction;

/// Why a session ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TerminalCause {
    /// Clean end of session (application-level disconnect either way).
    Completed,
    /// Peer sent a non-application disconnect.
    DisconnectedByPeer { reason: u32, description: String },
    /// This peer detected a protocol violation and disconnected.
    ProtocolError { detail: String },
    NegotiationFailed { detail: String },
    KexFailed { detail: String },
    /// Packet authentication failed (MAC, tag, or implausible length).
    AuthFailure { detail: String },
    /// Authentication was rejected by the server.
    AuthRejected,
    TranscriptMacMismatch,
    /// A sequence counter wrapped and the profile treats that as fatal.
    RolloverDetected,
    /// Transport ended without a disconnect message. Carries no protocol
    /// error; an abrupt cut is indistinguishable from a benign close.
    Eof { silent: bool },
    /// The scheduler saw no progress while the transport stayed open.
    Stalled,
}

impl TerminalCause {
    /// True when a session ended without any error observable by the peer.
    pub fn is_clean(&self) -> bool {
        matches!(self, TerminalCause::Completed | TerminalCause::Eof { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogEvent {
    BannerSent(String),
    BannerReceived(String),
    Sent {
        seq: u32,
        msg: Message,
    },
    Received {
        seq: u32,
        msg: Message,
    },
    /// A packet opened fine but its body was judged corrupt.
    ReceivedCorrupt {
        seq: u32,
        critical: bool,
        unknown_id: Option<u8>,
        detail: String,
    },
    /// Message understood and deliberately not acted upon.
    Ignored {
        what: String,
    },
    /// Early authentication request parked until the service starts.
    DeferredUserAuth {
        user: String,
    },
    ExtensionsRecorded {
        entries: Vec<(String, Vec<u8>)>,
        early: bool,
    },
    /// A cipher direction switched from cleartext to the negotiated mode.
    ChannelActive {
        direction: Direction,
        snd: u32,
        rcv: u32,
    },
    AuthOutcome {
        user: String,
        success: bool,
    },
    Terminal(TerminalCause),
}

impl LogEvent {
    pub fn describe(&self) -> String {
        match self {
            LogEvent::BannerSent(b) => format!("banner sent: {b}"),
            LogEvent::BannerReceived(b) => format!("banner received: {b}"),
            LogEvent::Sent { seq, msg } => format!("sent #{seq} {}", msg.name()),
            LogEvent::Received { seq, msg } => format!("received #{seq} {}", msg.name()),
            LogEvent::ReceivedCorrupt {
                seq,
                critical,
                unknown_id,
                detail,
            } => match unknown_id {
                Some(id) => format!("received #{seq} evasively corrupt (id {id})"),
                None => format!(
                    "received #{seq} {} corrupt: {detail}",
                    if *critical { "critically" } else { "" }
                ),
            },
            LogEvent::Ignored { what } => format!("ignored: {what}"),
            LogEvent::DeferredUserAuth { user } => format!("deferred auth request for {user}"),
            LogEvent::ExtensionsRecorded { entries, early } => format!(
                "recorded {} extension(s){}",
                entries.len(),
                if *early { " (before key activation)" } else { "" }
            ),
            LogEvent::ChannelActive {
                direction,
                snd,
                rcv,
            } => format!(
                "channel active {} (snd={snd} rcv={rcv})",
                direction.short()
            ),
            LogEvent::AuthOutcome { user, success } => {
                format!("auth {} for {user}", if *success { "success" } else { "failure" })
            }
            LogEvent::Terminal(cause) => format!("terminal: {cause:?}"),
        }
    }
}

/// Append-only log with convenience accessors used by test assertions.
#[derive(Debug, Clone, Default)]
pub struct EventLog {
    events: Vec<LogEvent>,
}

impl EventLog {
    pub fn push(&mut self, e: LogEvent) {
        self.events.push(e);
    }

    pub fn events(&self) -> &[LogEvent] {
        &self.events
    }

    pub fn terminal(&self) -> Option<&TerminalCause> {
        self.events.iter().rev().find_map(|e| match e {
            LogEvent::Terminal(c) => Some(c),
            _ => None,
        })
    }

    /// Messages received in order, decoded.
    pub fn received_messages(&self) -> Vec<&Message> {
        self.events
            .iter()
            .filter_map(|e| match e {
                LogEvent::Received { msg, .. } => Some(msg),
                _ => None,
            })
            .collect()
    }

    pub fn sent_messages(&self) -> Vec<&Message> {
        self.events
            .iter()
            .filter_map(|e| match e {
                LogEvent::Sent { msg, .. } => Some(msg),
                _ => None,
            })
            .collect()
    }

    pub fn received_named(&self, name: &str) -> Vec<&Message> {
        self.received_messages()
            .into_iter()
            .filter(|m| m.name() == name)
            .collect()
    }

    pub fn counters_at_activation(&self, direction: Direction) -> Option<(u32, u32)> {
        self.events.iter().find_map(|e| match e {
            LogEvent::ChannelActive {
                direction: d,
                snd,
                rcv,
            } if *d == direction => Some((*snd, *rcv)),
            _ => None,
        })
    }

    pub fn corrupt_receptions(&self) -> Vec<&LogEvent> {
        self.events
            .iter()
            .filter(|e| matches!(e, LogEvent::ReceivedCorrupt { .. }))
            .collect()
    }
}

pub(crate) fn corrupt_event(seq: u32, reason: &CorruptReason) -> LogEvent {
    LogEvent::ReceivedCorrupt {
        seq,
        critical: true,
        unknown_id: None,
        detail: format!("{reason:?}"),
    }
}
