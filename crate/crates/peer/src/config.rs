//! Peer configuration: algorithm preferences, strictness profile emulating
//! documented implementation behaviors, extension set, credentials, and
//! countermeasure switches.

use std::collections::BTreeMap;

use bpplab_proto::banner::VersionBanner;
use bpplab_proto::cipher::ModeId;
use bpplab_proto::kex::IndicatorNames;
use bpplab_proto::msg::Message;

use crate::counters::SeqModulus;

/// Behavioral switches emulating how fielded implementations deviate from
/// the strict reading of the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrictnessProfile {
    /// Accept a one-byte `ServiceAccept` with no service name.
    pub accept_empty_service_accept: bool,
    /// Respond `Unimplemented` to unrecognized messages; when false the peer
    /// disconnects instead.
    pub respond_unimplemented_to_unknown: bool,
    /// Accept an `ExtInfo` that arrives before key activation.
    pub accept_early_ext_info: bool,
    /// Accept and defer a `UserAuthRequest` that arrives before the
    /// authentication service is up.
    pub accept_early_userauth: bool,
    /// Silently drop authentication requests arriving after a success.
    pub ignore_extra_userauth_after_success: bool,
    /// Terminate the connection when a sequence counter wraps to zero.
    pub detect_seqno_rollover: bool,
}

impl StrictnessProfile {
    /// Default: every flaw flag off, rollover detection on.
    pub fn strict() -> Self {
        Self {
            accept_empty_service_accept: false,
            respond_unimplemented_to_unknown: true,
            accept_early_ext_info: false,
            accept_early_userauth: false,
            ignore_extra_userauth_after_success: false,
            detect_seqno_rollover: true,
        }
    }

    /// Lenient service-accept parsing, rollover detected.
    pub fn openssh_like() -> Self {
        Self {
            accept_empty_service_accept: true,
            ..Self::strict()
        }
    }

    /// Lenient service-accept parsing, rollover undetected.
    pub fn putty_like() -> Self {
        Self {
            accept_empty_service_accept: true,
            detect_seqno_rollover: false,
            ..Self::strict()
        }
    }

    /// Disconnects on unrecognized messages, allows counter rollover.
    pub fn dropbear_like() -> Self {
        Self {
            accept_empty_service_accept: true,
            respond_unimplemented_to_unknown: false,
            detect_seqno_rollover: false,
            ..Self::strict()
        }
    }

    /// Client that accepts unauthenticated extension messages.
    pub fn flawed_client() -> Self {
        Self {
            accept_early_ext_info: true,
            detect_seqno_rollover: false,
            ..Self::strict()
        }
    }

    /// Server that defers early authentication requests and ignores extras
    /// after success.
    pub fn flawed_server() -> Self {
        Self {
            accept_early_userauth: true,
            ignore_extra_userauth_after_success: true,
            detect_seqno_rollover: false,
            ..Self::strict()
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        Some(match name {
            "strict" => Self::strict(),
            "openssh" => Self::openssh_like(),
            "putty" => Self::putty_like(),
            "dropbear" => Self::dropbear_like(),
            "flawed-client" => Self::flawed_client(),
            "flawed-server" => Self::flawed_server(),
            _ => return None,
        })
    }

    pub const NAMES: [&'static str; 6] = [
        "strict",
        "openssh",
        "putty",
        "dropbear",
        "flawed-client",
        "flawed-server",
    ];
}

impl Default for StrictnessProfile {
    fn default() -> Self {
        Self::strict()
    }
}

/// Countermeasure switches; each becomes active only when both peers signal.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Countermeasures {
    pub seq_reset: bool,
    pub transcript_mac: bool,
}

/// Client credentials presented during authentication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClientAuth {
    pub user: String,
    pub password: String,
}

impl Default for ClientAuth {
    fn default() -> Self {
        Self {
            user: "alice".into(),
            password: "correct-horse".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PeerConfig {
    pub banner_software: String,
    /// Cipher/MAC preference order; name lists derive from it.
    pub modes: Vec<ModeId>,
    pub profile: StrictnessProfile,
    /// Extensions this peer announces in its `ExtInfo`.
    pub extensions: Vec<(String, Vec<u8>)>,
    /// Offer the extension-negotiation indicator in the kex list.
    pub signal_ext_info: bool,
    pub countermeasures: Countermeasures,
    pub indicators: IndicatorNames,
    pub seq_modulus: SeqModulus,
    /// Server side: acceptable user/password pairs.
    pub credential_store: BTreeMap<String, String>,
    /// Client side: credentials to present.
    pub auth: ClientAuth,
    /// Messages a server sends on the channel right after key activation
    /// (before any extension message).
    pub channel_prelude: Vec<Message>,
    /// Messages sent after authentication concludes.
    pub workload: Vec<Message>,
    /// Server: also send a second `ExtInfo` right before the authentication
    /// success message.
    pub send_second_ext_info: bool,
    /// Seed for all of this peer's randomness (cookie, padding, ephemeral).
    pub rng_seed: u64,
    /// Server host key seed (deterministic keypair).
    pub host_key_seed: [u8; 32],
}

impl PeerConfig {
    pub fn client_default() -> Self {
        Self {
            banner_software: "bpplab_0.1-client".into(),
            modes: vec![ModeId::ChaCha20Poly1305],
            profile: StrictnessProfile::strict(),
            extensions: Vec::new(),
            signal_ext_info: true,
            countermeasures: Countermeasures::default(),
            indicators: IndicatorNames::default(),
            seq_modulus: SeqModulus::W32,
            credential_store: BTreeMap::new(),
            auth: ClientAuth::default(),
            channel_prelude: Vec::new(),
            workload: Vec::new(),
            send_second_ext_info: false,
            rng_seed: 1,
            host_key_seed: [0u8; 32],
        }
    }

    pub fn server_default() -> Self {
        let mut store = BTreeMap::new();
        store.insert("alice".to_string(), "correct-horse".to_string());
        Self {
            banner_software: "bpplab_0.1-server".into(),
            modes: vec![ModeId::ChaCha20Poly1305],
            profile: StrictnessProfile::strict(),
            extensions: vec![("server-sig-algs".into(), b"ssh-ed25519,rsa-sha2-256".to_vec())],
            signal_ext_info: true,
            countermeasures: Countermeasures::default(),
            indicators: IndicatorNames::default(),
            seq_modulus: SeqModulus::W32,
            credential_store: store,
            auth: ClientAuth::default(),
            channel_prelude: Vec::new(),
            workload: Vec::new(),
            send_second_ext_info: false,
            rng_seed: 2,
            host_key_seed: [7u8; 32],
        }
    }

    pub fn banner(&self) -> VersionBanner {
        VersionBanner::new(format!("SSH-2.0-{}", self.banner_software)).expect("valid banner")
    }

    pub fn with_mode(mut self, mode: ModeId) -> Self {
        self.modes = vec![mode];
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }
}
