//! Binary packet framing: length field, padding law, and the corruption
//! verdicts a receiver assigns to decrypted packets.

use rand::RngCore;
use thiserror::Error;

use crate::msg::Message;
use crate::registry::MessageIdRegistry;

/// Hard ceiling on the declared packet length a receiver will accept.
pub const MAX_DECLARED_LEN: u32 = 35000;
/// Largest payload `encode_packet` accepts.
pub const MAX_PAYLOAD: usize = 32768;
pub const MIN_PADDING: u8 = 4;

/// Whether the 4-byte length field counts toward block alignment.
///
/// Classic modes encrypt the length with the rest of the packet, so the
/// whole `4 + packet_length` region must align. Modes that transmit the
/// length outside the encrypted region (and the two-key stream construction,
/// which encrypts it separately) align `packet_length` alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthFraming {
    /// `4 + packet_length` is a multiple of max(8, block size).
    IncludedInAlignment,
    /// `packet_length` alone is a multiple of max(8, block size).
    ExcludedFromAlignment,
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum PacketError {
    #[error("payload of {0} bytes exceeds the {MAX_PAYLOAD} byte limit")]
    PayloadTooLarge(usize),
    #[error("packet invariant violated: {0}")]
    BadInvariant(&'static str),
}

/// One plaintext binary packet: padding length byte, payload, padding.
/// The length field is derived, not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryPacket {
    pub payload: Vec<u8>,
    pub padding: Vec<u8>,
}

impl BinaryPacket {
    /// Value of the 4-byte length field: everything after it.
    pub fn packet_length(&self) -> u32 {
        (1 + self.payload.len() + self.padding.len()) as u32
    }

    pub fn padding_length(&self) -> u8 {
        self.padding.len() as u8
    }

    /// The region covered by encryption in classic modes and by the cipher
    /// body in the others: padding length byte, payload, padding.
    pub fn body(&self) -> Vec<u8> {
        let mut v = Vec::with_capacity(1 + self.payload.len() + self.padding.len());
        v.push(self.padding_length());
        v.extend_from_slice(&self.payload);
        v.extend_from_slice(&self.padding);
        v
    }

    /// Full plaintext wire form: length field followed by the body.
    pub fn wire_plaintext(&self) -> Vec<u8> {
        let mut v = Vec::with_capacity(4 + 1 + self.payload.len() + self.padding.len());
        v.extend_from_slice(&self.packet_length().to_be_bytes());
        v.extend_from_slice(&self.body());
        v
    }

    /// Reassemble from a body region (`padding_length ‖ payload ‖ padding`)
    /// without judging well-formedness; used by cipher-layer round trips.
    pub fn from_body_unchecked(body: &[u8]) -> Result<Self, PacketError> {
        if body.is_empty() {
            return Err(PacketError::BadInvariant("empty packet body"));
        }
        let p = body[0] as usize;
        if 1 + p > body.len() {
            return Err(PacketError::BadInvariant("padding exceeds packet"));
        }
        let payload_len = body.len() - 1 - p;
        Ok(Self {
            payload: body[1..1 + payload_len].to_vec(),
            padding: body[1 + payload_len..].to_vec(),
        })
    }
}

/// Smallest padding length `p >= 4` such that the framed packet satisfies
/// the alignment rule for `block_size` under `framing`.
pub fn padding_for(payload_len: usize, block_size: usize, framing: LengthFraming) -> u8 {
    let align = block_size.max(8);
    let fixed = match framing {
        LengthFraming::IncludedInAlignment => 4 + 1 + payload_len,
        LengthFraming::ExcludedFromAlignment => 1 + payload_len,
    };
    let mut p = MIN_PADDING as usize;
    while (fixed + p) % align != 0 {
        p += 1;
    }
    p as u8
}

/// Frame a message into a binary packet, drawing padding bytes from
/// `padding_source`.
pub fn encode_packet(
    msg: &Message,
    block_size: usize,
    framing: LengthFraming,
    padding_source: &mut dyn RngCore,
) -> Result<BinaryPacket, PacketError> {
    let payload = msg.encode();
    if payload.len() > MAX_PAYLOAD {
        return Err(PacketError::PayloadTooLarge(payload.len()));
    }
    let p = padding_for(payload.len(), block_size, framing);
    let mut padding = vec![0u8; p as usize];
    padding_source.fill_bytes(&mut padding);
    Ok(BinaryPacket { payload, padding })
}

/// Why a packet body was judged critically corrupt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorruptReason {
    EmptyBody,
    /// padding length outside `4 ..= len - 2`
    BadPaddingLength {
        padding_length: u8,
        body_len: usize,
    },
    /// recognized id whose body fields do not parse
    MalformedBody {
        id: u8,
        detail: String,
    },
}

/// Receiver-side judgement of one decrypted packet body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// Well-formed, recognized, body parsed.
    Message(Message),
    /// Violates framing or a recognized body fails to parse; fatal for the
    /// connection.
    CriticallyCorrupt(CorruptReason),
    /// Well-formed framing but unrecognized id; elicits `Unimplemented` and
    /// the connection continues.
    EvasivelyCorrupt { id: u8 },
}

impl DecodeOutcome {
    pub fn is_evasive(&self) -> bool {
        matches!(self, DecodeOutcome::EvasivelyCorrupt { .. })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DecodeOptions<'a> {
    pub registry: &'a MessageIdRegistry,
    /// Accept a one-byte `ServiceAccept` with no service name.
    pub lenient_service_accept: bool,
}

/// Judge a decrypted packet body (`padding_length ‖ payload ‖ padding`).
///
/// Well-formed means `4 <= padding_length <= len - 2`, leaving at least one
/// payload byte for the message id.
pub fn decode_packet(body: &[u8], opts: DecodeOptions<'_>) -> DecodeOutcome {
    if body.is_empty() {
        return DecodeOutcome::CriticallyCorrupt(CorruptReason::EmptyBody);
    }
    let p = body[0];
    let len = body.len();
    if (p as usize) < MIN_PADDING as usize || (p as usize) > len.saturating_sub(2) {
        return DecodeOutcome::CriticallyCorrupt(CorruptReason::BadPaddingLength {
            padding_length: p,
            body_len: len,
        });
    }
    let payload = &body[1..len - p as usize];
    let id = payload[0];
    if !opts.registry.contains(id) {
        return DecodeOutcome::EvasivelyCorrupt { id };
    }
    match Message::decode(payload, opts.lenient_service_accept) {
        Ok(msg) => DecodeOutcome::Message(msg),
        Err(e) => DecodeOutcome::CriticallyCorrupt(CorruptReason::MalformedBody {
            id,
            detail: e.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::msg::id;
    use rand::rngs::mock::StepRng;

    fn opts(reg: &MessageIdRegistry) -> DecodeOptions<'_> {
        DecodeOptions {
            registry: reg,
            lenient_service_accept: false,
        }
    }

    /// Independent oracle: enumerate padding lengths from 4 upward and take
    /// the first satisfying the alignment law directly.
    fn brute_force_padding(payload_len: usize, block: usize, framing: LengthFraming) -> u8 {
        let align = block.max(8);
        for p in 4..=255usize {
            let packet_length = 1 + payload_len + p;
            let aligned = match framing {
                LengthFraming::IncludedInAlignment => (4 + packet_length) % align == 0,
                LengthFraming::ExcludedFromAlignment => packet_length % align == 0,
            };
            if aligned {
                return p as u8;
            }
        }
        unreachable!("some p in 4..=255 always aligns");
    }

    #[test]
    fn empty_ignore_block8_classic() {
        // payload = id byte + u32 length = 5 bytes
        let mut rng = StepRng::new(0, 1);
        let pkt = encode_packet(
            &Message::Ignore { data: vec![] },
            8,
            LengthFraming::IncludedInAlignment,
            &mut rng,
        )
        .unwrap();
        assert_eq!(pkt.payload.len(), 5);
        assert_eq!(pkt.padding_length(), 6);
        assert_eq!(pkt.packet_length(), 12);
        assert_eq!((4 + pkt.packet_length()) % 8, 0);
    }

    #[test]
    fn service_accept_block16_unencrypted_length() {
        let mut rng = StepRng::new(0, 1);
        let pkt = encode_packet(
            &Message::ServiceAccept {
                name: "ssh-userauth".into(),
            },
            16,
            LengthFraming::ExcludedFromAlignment,
            &mut rng,
        )
        .unwrap();
        assert_eq!(pkt.payload.len(), 17);
        assert_eq!(pkt.padding_length(), 14);
        assert_eq!(pkt.packet_length(), 32);
    }

    #[test]
    fn padding_law_exhaustive() {
        for payload_len in 1..=5000usize {
            for block in [8usize, 16] {
                for framing in [
                    LengthFraming::IncludedInAlignment,
                    LengthFraming::ExcludedFromAlignment,
                ] {
                    let p = padding_for(payload_len, block, framing);
                    assert_eq!(p, brute_force_padding(payload_len, block, framing));
                    assert!((4..=255).contains(&(p as usize)));
                }
            }
        }
    }

    #[test]
    fn decode_round_trip() {
        let reg = MessageIdRegistry::default();
        let msg = Message::Debug {
            always_display: true,
            message: "hello".into(),
            language: String::new(),
        };
        let mut rng = StepRng::new(7, 13);
        let pkt = encode_packet(&msg, 16, LengthFraming::IncludedInAlignment, &mut rng).unwrap();
        assert_eq!(
            decode_packet(&pkt.body(), opts(&reg)),
            DecodeOutcome::Message(msg)
        );
    }

    #[test]
    fn verdict_unknown_id_is_evasive() {
        let reg = MessageIdRegistry::default();
        let mut body = vec![0u8; 16];
        body[0] = 4;
        body[1] = 200;
        assert_eq!(
            decode_packet(&body, opts(&reg)),
            DecodeOutcome::EvasivelyCorrupt { id: 200 }
        );
    }

    #[test]
    fn verdict_short_padding_is_critical() {
        let reg = MessageIdRegistry::default();
        let mut body = vec![0u8; 16];
        body[0] = 2;
        assert!(matches!(
            decode_packet(&body, opts(&reg)),
            DecodeOutcome::CriticallyCorrupt(CorruptReason::BadPaddingLength { .. })
        ));
    }

    #[test]
    fn lenient_service_accept_block() {
        // 32-byte body with p = 0x1E and id = 6: one-byte ServiceAccept.
        let reg = MessageIdRegistry::default();
        let mut body = vec![0xAAu8; 32];
        body[0] = 0x1E;
        body[1] = id::SERVICE_ACCEPT;
        let lenient = DecodeOptions {
            registry: &reg,
            lenient_service_accept: true,
        };
        assert_eq!(
            decode_packet(&body, lenient),
            DecodeOutcome::Message(Message::ServiceAccept {
                name: String::new()
            })
        );
        assert!(matches!(
            decode_packet(&body, opts(&reg)),
            DecodeOutcome::CriticallyCorrupt(CorruptReason::MalformedBody { id: 6, .. })
        ));
    }

    /// Counting oracle: over all 2^16 leading (padding_length, id) pairs of a
    /// 16-byte body, exactly min(252, len-5) * unknown_count combinations are
    /// evasively corrupt.
    #[test]
    fn counting_oracle_len16() {
        let reg = MessageIdRegistry::default();
        let mut evasive = 0usize;
        for p in 0..=255u8 {
            for id in 0..=255u8 {
                let mut body = vec![0xA5u8; 16];
                body[0] = p;
                body[1] = id;
                if decode_packet(&body, opts(&reg)).is_evasive() {
                    evasive += 1;
                }
            }
        }
        assert_eq!(evasive, 11 * 213);
    }
}
