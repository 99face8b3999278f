//! Full handshake transcript and its channel-start authenticator.
//!
//! The exchange hash covers only a fixed selection of handshake fields; this
//! module records every byte actually sent and received up to and including
//! the key-activation message, so the peers can authenticate the complete
//! transcript once the channel is up.

use hmac::{Hmac, Mac};
use sha2::Sha256;

use crate::banner::VersionBanner;
use crate::wire::Writer;
use crate::Direction;

type HmacSha256 = Hmac<Sha256>;

/// Append-only record of both banners and the raw wire bytes of every packet
/// exchanged before the channel, kept per direction.
#[derive(Debug, Clone, Default)]
pub struct FullTranscript {
    client_banner: Option<VersionBanner>,
    server_banner: Option<VersionBanner>,
    client_to_server: Vec<Vec<u8>>,
    server_to_client: Vec<Vec<u8>>,
}

impl FullTranscript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_banner(&mut self, direction: Direction, banner: &VersionBanner) {
        match direction {
            Direction::ClientToServer => self.client_banner = Some(banner.clone()),
            Direction::ServerToClient => self.server_banner = Some(banner.clone()),
        }
    }

    pub fn record_packet(&mut self, direction: Direction, wire_bytes: &[u8]) {
        match direction {
            Direction::ClientToServer => self.client_to_server.push(wire_bytes.to_vec()),
            Direction::ServerToClient => self.server_to_client.push(wire_bytes.to_vec()),
        }
    }

    pub fn packet_count(&self, direction: Direction) -> usize {
        match direction {
            Direction::ClientToServer => self.client_to_server.len(),
            Direction::ServerToClient => self.server_to_client.len(),
        }
    }

    /// Canonical serialization: banners, then each direction's packets in
    /// order, every element length-prefixed. Two peers produce identical
    /// bytes exactly when their views of the handshake agree.
    pub fn serialize(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put_string(
            self.client_banner
                .as_ref()
                .map(|b| b.as_bytes())
                .unwrap_or_default(),
        );
        w.put_string(
            self.server_banner
                .as_ref()
                .map(|b| b.as_bytes())
                .unwrap_or_default(),
        );
        for (tag, packets) in [
            (b"C2S" as &[u8], &self.client_to_server),
            (b"S2C", &self.server_to_client),
        ] {
            w.put_raw(tag);
            w.put_u32(packets.len() as u32);
            for p in packets {
                w.put_string(p);
            }
        }
        w.into_bytes()
    }
}

/// MAC over the serialized transcript under a session-bound key.
pub fn transcript_mac(transcript: &FullTranscript, key: &[u8; 32]) -> [u8; 32] {
    let mut mac = HmacSha256::new_from_slice(key).expect("mac key");
    mac.update(&transcript.serialize());
    mac.finalize().into_bytes().into()
}
