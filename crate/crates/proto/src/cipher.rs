//! The six authenticated encryption modes of the binary packet protocol,
//! with exact per-packet state evolution.
//!
//! Each direction of a connection owns one [`DirectionalCipherState`]. Until
//! activation the state passes packets through as plaintext framing with no
//! integrity tag. After activation, `seal`/`open` apply the negotiated mode:
//!
//! * `aes128-cbc` + `hmac-sha2-256` (encrypt-and-MAC): MAC over sequence
//!   number and plaintext; IV chaining carries the last ciphertext block
//!   from packet to packet.
//! * `aes128-cbc` + `hmac-sha2-256-etm@openssh.com`: length field stays
//!   unencrypted, MAC over sequence number, length and ciphertext.
//! * `aes128-ctr` with either MAC: one running block counter, advanced per
//!   encrypted block, never reset.
//! * `aes128-gcm@openssh.com`: 12-byte nonce of 4 fixed bytes and an 8-byte
//!   invocation counter, both seeded from the derived IV; the sequence
//!   number is not an input.
//! * `chacha20-poly1305@openssh.com`: separate length and payload keys, the
//!   packet sequence number is the nonce, the one-time Poly1305 key comes
//!   from keystream block zero.

use aes::cipher::{BlockDecrypt, BlockEncrypt, KeyInit as BlockKeyInit};
use aes::Aes128;
use aes_gcm::aead::{Aead, Payload};
use aes_gcm::{Aes128Gcm, Nonce};
use chacha20::cipher::{KeyIvInit, StreamCipher, StreamCipherSeek};
use chacha20::ChaCha20;
use hmac::{Hmac, Mac};
use poly1305::Poly1305;
use sha2::Sha256;
use subtle::ConstantTimeEq;
use thiserror::Error;

use crate::packet::{BinaryPacket, LengthFraming, MAX_DECLARED_LEN};

type HmacSha256 = Hmac<Sha256>;

pub const MAC_LEN: usize = 32;
pub const TAG_LEN: usize = 16;
const AES_BLOCK: usize = 16;

/// Exposure taxonomy of a mode under prefix truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Taxonomy {
    NotVulnerable,
    VulnerableNotExploitable,
    VulnerableProbabilistic,
    VulnerableExploitable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeId {
    CbcEam,
    CbcEtm,
    CtrEam,
    CtrEtm,
    Gcm,
    ChaCha20Poly1305,
}

impl ModeId {
    pub const ALL: [ModeId; 6] = [
        ModeId::CbcEam,
        ModeId::CbcEtm,
        ModeId::CtrEam,
        ModeId::CtrEtm,
        ModeId::Gcm,
        ModeId::ChaCha20Poly1305,
    ];

    /// Cipher name as negotiated on the wire.
    pub fn cipher_wire_name(self) -> &'static str {
        match self {
            ModeId::CbcEam | ModeId::CbcEtm => "aes128-cbc",
            ModeId::CtrEam | ModeId::CtrEtm => "aes128-ctr",
            ModeId::Gcm => "aes128-gcm@openssh.com",
            ModeId::ChaCha20Poly1305 => "chacha20-poly1305@openssh.com",
        }
    }

    /// MAC name as negotiated on the wire; AEAD modes carry their own tag.
    pub fn mac_wire_name(self) -> Option<&'static str> {
        match self {
            ModeId::CbcEam | ModeId::CtrEam => Some("hmac-sha2-256"),
            ModeId::CbcEtm | ModeId::CtrEtm => Some("hmac-sha2-256-etm@openssh.com"),
            ModeId::Gcm | ModeId::ChaCha20Poly1305 => None,
        }
    }

    /// Short label used in reports and scenario names.
    pub fn label(self) -> &'static str {
        match self {
            ModeId::CbcEam => "cbc-eam",
            ModeId::CbcEtm => "cbc-etm",
            ModeId::CtrEam => "ctr-eam",
            ModeId::CtrEtm => "ctr-etm",
            ModeId::Gcm => "gcm",
            ModeId::ChaCha20Poly1305 => "chacha20-poly1305",
        }
    }

    pub fn from_label(s: &str) -> Option<ModeId> {
        ModeId::ALL.iter().copied().find(|m| m.label() == s)
    }

    pub fn block_size(self) -> usize {
        match self {
            ModeId::ChaCha20Poly1305 => 8,
            _ => AES_BLOCK,
        }
    }

    pub fn length_framing(self) -> LengthFraming {
        match self {
            ModeId::CbcEam | ModeId::CtrEam => LengthFraming::IncludedInAlignment,
            _ => LengthFraming::ExcludedFromAlignment,
        }
    }

    /// True when the 4-byte length travels unencrypted, readable by anyone
    /// on the wire.
    pub fn length_visible_on_wire(self) -> bool {
        matches!(self, ModeId::CbcEtm | ModeId::CtrEtm | ModeId::Gcm)
    }

    pub fn tag_len(self) -> usize {
        match self {
            ModeId::CbcEam | ModeId::CbcEtm | ModeId::CtrEam | ModeId::CtrEtm => MAC_LEN,
            ModeId::Gcm | ModeId::ChaCha20Poly1305 => TAG_LEN,
        }
    }

    pub fn taxonomy(self) -> Taxonomy {
        match self {
            ModeId::CbcEam | ModeId::CtrEam | ModeId::Gcm => Taxonomy::NotVulnerable,
            ModeId::CtrEtm => Taxonomy::VulnerableNotExploitable,
            ModeId::CbcEtm => Taxonomy::VulnerableProbabilistic,
            ModeId::ChaCha20Poly1305 => Taxonomy::VulnerableExploitable,
        }
    }

    pub fn key_len(self) -> usize {
        match self {
            ModeId::ChaCha20Poly1305 => 64,
            _ => 16,
        }
    }

    pub fn iv_len(self) -> usize {
        match self {
            ModeId::Gcm => 12,
            ModeId::ChaCha20Poly1305 => 0,
            _ => AES_BLOCK,
        }
    }

    pub fn mac_key_len(self) -> usize {
        match self.mac_wire_name() {
            Some(_) => 32,
            None => 0,
        }
    }
}

impl std::fmt::Display for ModeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpenError {
    #[error("declared packet length {0} is not plausible")]
    BadDeclaredLength(u32),
    #[error("wire data shorter than the declared packet")]
    TruncatedWire,
    #[error("MAC verification failed")]
    MacMismatch,
    #[error("AEAD tag verification failed")]
    TagMismatch,
}

/// Mode-specific mutable state, one instance per direction.
#[derive(Debug, Clone)]
enum ModeState {
    Cleartext,
    CbcHmac {
        enc: Box<Aes128>,
        mac_key: [u8; 32],
        chain_iv: [u8; 16],
        etm: bool,
    },
    CtrHmac {
        enc: Box<Aes128>,
        mac_key: [u8; 32],
        /// Current counter block, big-endian value of the full 16-byte block.
        ctr: u128,
        etm: bool,
    },
    Gcm {
        key: [u8; 16],
        fixed: [u8; 4],
        invocation_ctr: u64,
    },
    ChaChaPoly {
        payload_key: [u8; 32],
        length_key: [u8; 32],
    },
}

/// Per-direction cipher state: inactive until the key-activation message,
/// then applying exactly the state evolution of the selected mode.
#[derive(Debug, Clone)]
pub struct DirectionalCipherState {
    mode: Option<ModeId>,
    active: bool,
    state: ModeState,
}

impl DirectionalCipherState {
    /// Pre-handshake state: plaintext framing, no integrity.
    pub fn cleartext() -> Self {
        Self {
            mode: None,
            active: false,
            state: ModeState::Cleartext,
        }
    }

    /// Build a keyed but not yet activated state from raw key material.
    /// `key` and `iv` lengths must match the mode's requirements.
    pub fn from_key_material(mode: ModeId, key: &[u8], iv: &[u8], mac_key: &[u8]) -> Self {
        assert_eq!(key.len(), mode.key_len(), "key length");
        assert_eq!(iv.len(), mode.iv_len(), "iv length");
        assert_eq!(mac_key.len(), mode.mac_key_len(), "mac key length");
        let state = match mode {
            ModeId::CbcEam | ModeId::CbcEtm => ModeState::CbcHmac {
                enc: Box::new(Aes128::new_from_slice(key).expect("aes key")),
                mac_key: mac_key.try_into().expect("mac key"),
                chain_iv: iv.try_into().expect("iv"),
                etm: mode == ModeId::CbcEtm,
            },
            ModeId::CtrEam | ModeId::CtrEtm => ModeState::CtrHmac {
                enc: Box::new(Aes128::new_from_slice(key).expect("aes key")),
                mac_key: mac_key.try_into().expect("mac key"),
                ctr: u128::from_be_bytes(iv.try_into().expect("iv")),
                etm: mode == ModeId::CtrEtm,
            },
            ModeId::Gcm => ModeState::Gcm {
                key: key.try_into().expect("gcm key"),
                fixed: iv[..4].try_into().expect("gcm fixed"),
                invocation_ctr: u64::from_be_bytes(iv[4..12].try_into().expect("gcm ctr")),
            },
            ModeId::ChaCha20Poly1305 => ModeState::ChaChaPoly {
                payload_key: key[..32].try_into().expect("payload key"),
                length_key: key[32..64].try_into().expect("length key"),
            },
        };
        Self {
            mode: Some(mode),
            active: false,
            state,
        }
    }

    pub fn mode(&self) -> Option<ModeId> {
        self.mode
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    /// Key activation: from here on `seal`/`open` apply the mode.
    pub fn activate(&mut self) {
        assert!(
            !matches!(self.state, ModeState::Cleartext),
            "cannot activate a cleartext state"
        );
        self.active = true;
    }

    /// Number of wire bytes needed before the packet length can be read.
    pub fn min_peek(&self) -> usize {
        if !self.active {
            return 4;
        }
        match &self.state {
            ModeState::CbcHmac { etm: false, .. } | ModeState::CtrHmac { etm: false, .. } => {
                AES_BLOCK
            }
            _ => 4,
        }
    }

    /// Total wire bytes of a packet with the given declared length.
    pub fn wire_len_for(&self, packet_length: u32) -> usize {
        let tag = if self.active {
            self.mode.map(ModeId::tag_len).unwrap_or(0)
        } else {
            0
        };
        4 + packet_length as usize + tag
    }

    /// Read the declared packet length from the first wire bytes without
    /// advancing any cipher state. Requires at least `min_peek` bytes.
    pub fn peek_packet_length(&self, head: &[u8], seqno: u32) -> Result<u32, OpenError> {
        if head.len() < self.min_peek() {
            return Err(OpenError::TruncatedWire);
        }
        let declared = if !self.active {
            be32(&head[..4])
        } else {
            match &self.state {
                ModeState::Cleartext => be32(&head[..4]),
                ModeState::CbcHmac {
                    etm, enc, chain_iv, ..
                } => {
                    if *etm {
                        be32(&head[..4])
                    } else {
                        let mut block = [0u8; AES_BLOCK];
                        block.copy_from_slice(&head[..AES_BLOCK]);
                        decrypt_block(enc, &mut block);
                        xor_in_place(&mut block, chain_iv);
                        be32(&block[..4])
                    }
                }
                ModeState::CtrHmac { etm, enc, ctr, .. } => {
                    if *etm {
                        be32(&head[..4])
                    } else {
                        let ks = ctr_keystream_block(enc, *ctr);
                        let mut four = [0u8; 4];
                        for i in 0..4 {
                            four[i] = head[i] ^ ks[i];
                        }
                        be32(&four)
                    }
                }
                ModeState::Gcm { .. } => be32(&head[..4]),
                ModeState::ChaChaPoly { length_key, .. } => {
                    let mut four = [0u8; 4];
                    four.copy_from_slice(&head[..4]);
                    chacha_apply(length_key, seqno, 0, &mut four);
                    be32(&four)
                }
            }
        };
        check_declared(declared)?;
        Ok(declared)
    }

    /// Seal one packet for the wire, advancing mode state.
    pub fn seal(&mut self, seqno: u32, packet: &BinaryPacket) -> Vec<u8> {
        if !self.active {
            return packet.wire_plaintext();
        }
        let len_be = packet.packet_length().to_be_bytes();
        let body = packet.body();
        match &mut self.state {
            ModeState::Cleartext => packet.wire_plaintext(),
            ModeState::CbcHmac {
                enc,
                mac_key,
                chain_iv,
                etm: false,
            } => {
                // MAC over seqno and full plaintext, then encrypt everything.
                let mut plain = Vec::with_capacity(4 + body.len());
                plain.extend_from_slice(&len_be);
                plain.extend_from_slice(&body);
                let mac = hmac_over(mac_key, seqno, &[&plain]);
                cbc_encrypt(enc, chain_iv, &mut plain);
                plain.extend_from_slice(&mac);
                plain
            }
            ModeState::CbcHmac {
                enc,
                mac_key,
                chain_iv,
                etm: true,
            } => {
                let mut ct = body;
                cbc_encrypt(enc, chain_iv, &mut ct);
                let mac = hmac_over(mac_key, seqno, &[&len_be, &ct]);
                let mut wire = Vec::with_capacity(4 + ct.len() + MAC_LEN);
                wire.extend_from_slice(&len_be);
                wire.extend_from_slice(&ct);
                wire.extend_from_slice(&mac);
                wire
            }
            ModeState::CtrHmac {
                enc,
                mac_key,
                ctr,
                etm: false,
            } => {
                let mut plain = Vec::with_capacity(4 + body.len());
                plain.extend_from_slice(&len_be);
                plain.extend_from_slice(&body);
                let mac = hmac_over(mac_key, seqno, &[&plain]);
                ctr_apply(enc, ctr, &mut plain);
                plain.extend_from_slice(&mac);
                plain
            }
            ModeState::CtrHmac {
                enc,
                mac_key,
                ctr,
                etm: true,
            } => {
                let mut ct = body;
                ctr_apply(enc, ctr, &mut ct);
                let mac = hmac_over(mac_key, seqno, &[&len_be, &ct]);
                let mut wire = Vec::with_capacity(4 + ct.len() + MAC_LEN);
                wire.extend_from_slice(&len_be);
                wire.extend_from_slice(&ct);
                wire.extend_from_slice(&mac);
                wire
            }
            ModeState::Gcm {
                key,
                fixed,
                invocation_ctr,
            } => {
                let aead = Aes128Gcm::new_from_slice(key).expect("gcm key");
                let nonce_bytes = gcm_nonce(fixed, *invocation_ctr);
                *invocation_ctr = invocation_ctr.wrapping_add(1);
                let ct_tag = aead
                    .encrypt(
                        Nonce::from_slice(&nonce_bytes),
                        Payload {
                            msg: &body,
                            aad: &len_be,
                        },
                    )
                    .expect("gcm encrypt");
                let mut wire = Vec::with_capacity(4 + ct_tag.len());
                wire.extend_from_slice(&len_be);
                wire.extend_from_slice(&ct_tag);
                wire
            }
            ModeState::ChaChaPoly {
                payload_key,
                length_key,
            } => {
                let mut len_ct = len_be;
                chacha_apply(length_key, seqno, 0, &mut len_ct);
                let poly_key = chacha_poly_key(payload_key, seqno);
                let mut ct = body;
                chacha_apply(payload_key, seqno, 1, &mut ct);
                let mut authed = Vec::with_capacity(4 + ct.len());
                authed.extend_from_slice(&len_ct);
                authed.extend_from_slice(&ct);
                let tag = poly1305_tag(&poly_key, &authed);
                authed.extend_from_slice(&tag);
                authed
            }
        }
    }

    /// Open one complete wire packet, advancing mode state on success and on
    /// MAC-valid-but-garbled plaintext alike. Returns the packet body.
    pub fn open(&mut self, seqno: u32, wire: &[u8]) -> Result<Vec<u8>, OpenError> {
        if wire.len() < self.min_peek() {
            return Err(OpenError::TruncatedWire);
        }
        if !self.active {
            let declared = be32(&wire[..4]);
            check_declared(declared)?;
            if wire.len() < 4 + declared as usize {
                return Err(OpenError::TruncatedWire);
            }
            return Ok(wire[4..4 + declared as usize].to_vec());
        }
        // The two-key stream construction authenticates the framed extent
        // before anything else; the other modes frame by length first.
        if let ModeState::ChaChaPoly {
            payload_key,
            length_key,
        } = &self.state
        {
            return open_chacha(payload_key, length_key, seqno, wire);
        }
        let declared = self.peek_packet_length(wire, seqno)?;
        let total = self.wire_len_for(declared);
        if wire.len() < total {
            return Err(OpenError::TruncatedWire);
        }
        let wire = &wire[..total];
        match &mut self.state {
            ModeState::Cleartext => unreachable!("active cleartext"),
            ModeState::CbcHmac {
                enc,
                mac_key,
                chain_iv,
                etm: false,
            } => {
                let (ct, mac) = wire.split_at(wire.len() - MAC_LEN);
                let mut plain = ct.to_vec();
                cbc_decrypt(enc, chain_iv, &mut plain);
                let expected = hmac_over(mac_key, seqno, &[&plain]);
                if !bool::from(expected[..].ct_eq(mac)) {
                    return Err(OpenError::MacMismatch);
                }
                Ok(plain[4..].to_vec())
            }
            ModeState::CbcHmac {
                enc,
                mac_key,
                chain_iv,
                etm: true,
            } => {
                let len_be = &wire[..4];
                let (ct, mac) = wire[4..].split_at(wire.len() - 4 - MAC_LEN);
                let expected = hmac_over(mac_key, seqno, &[len_be, ct]);
                if !bool::from(expected[..].ct_eq(mac)) {
                    return Err(OpenError::MacMismatch);
                }
                let mut plain = ct.to_vec();
                cbc_decrypt(enc, chain_iv, &mut plain);
                Ok(plain)
            }
            ModeState::CtrHmac {
                enc,
                mac_key,
                ctr,
                etm: false,
            } => {
                let (ct, mac) = wire.split_at(wire.len() - MAC_LEN);
                let mut plain = ct.to_vec();
                ctr_apply(enc, ctr, &mut plain);
                let expected = hmac_over(mac_key, seqno, &[&plain]);
                if !bool::from(expected[..].ct_eq(mac)) {
                    return Err(OpenError::MacMismatch);
                }
                Ok(plain[4..].to_vec())
            }
            ModeState::CtrHmac {
                enc,
                mac_key,
                ctr,
                etm: true,
            } => {
                let len_be = &wire[..4];
                let (ct, mac) = wire[4..].split_at(wire.len() - 4 - MAC_LEN);
                let expected = hmac_over(mac_key, seqno, &[len_be, ct]);
                if !bool::from(expected[..].ct_eq(mac)) {
                    return Err(OpenError::MacMismatch);
                }
                let mut plain = ct.to_vec();
                ctr_apply(enc, ctr, &mut plain);
                Ok(plain)
            }
            ModeState::Gcm {
                key,
                fixed,
                invocation_ctr,
            } => {
                let aead = Aes128Gcm::new_from_slice(key).expect("gcm key");
                let nonce_bytes = gcm_nonce(fixed, *invocation_ctr);
                let len_be = &wire[..4];
                let ct_tag = &wire[4..];
                match aead.decrypt(
                    Nonce::from_slice(&nonce_bytes),
                    Payload {
                        msg: ct_tag,
                        aad: len_be,
                    },
                ) {
                    Ok(plain) => {
                        // counter advances only on accepted packets
                        *invocation_ctr = invocation_ctr.wrapping_add(1);
                        Ok(plain)
                    }
                    Err(_) => Err(OpenError::TagMismatch),
                }
            }
            ModeState::ChaChaPoly { .. } => unreachable!("handled above"),
        }
    }
}

/// Tag over `len_ct ‖ payload_ct` is checked across the framed extent before
/// the length field is even read.
fn open_chacha(
    payload_key: &[u8; 32],
    length_key: &[u8; 32],
    seqno: u32,
    wire: &[u8],
) -> Result<Vec<u8>, OpenError> {
    if wire.len() < 4 + TAG_LEN {
        return Err(OpenError::TruncatedWire);
    }
    let (authed, tag) = wire.split_at(wire.len() - TAG_LEN);
    let poly_key = chacha_poly_key(payload_key, seqno);
    let expected = poly1305_tag(&poly_key, authed);
    if !bool::from(expected[..].ct_eq(tag)) {
        return Err(OpenError::TagMismatch);
    }
    let mut len_be = [0u8; 4];
    len_be.copy_from_slice(&authed[..4]);
    chacha_apply(length_key, seqno, 0, &mut len_be);
    let declared = u32::from_be_bytes(len_be);
    check_declared(declared)?;
    if authed.len() != 4 + declared as usize {
        return Err(OpenError::BadDeclaredLength(declared));
    }
    let mut plain = authed[4..].to_vec();
    chacha_apply(payload_key, seqno, 1, &mut plain);
    Ok(plain)
}

fn be32(b: &[u8]) -> u32 {
    u32::from_be_bytes([b[0], b[1], b[2], b[3]])
}

fn check_declared(declared: u32) -> Result<(), OpenError> {
    if declared > MAX_DECLARED_LEN || declared < 5 {
        Err(OpenError::BadDeclaredLength(declared))
    } else {
        Ok(())
    }
}

fn xor_in_place(dst: &mut [u8; 16], src: &[u8; 16]) {
    for i in 0..16 {
        dst[i] ^= src[i];
    }
}

fn encrypt_block(aes: &Aes128, block: &mut [u8; 16]) {
    let ga = aes::cipher::generic_array::GenericArray::from_mut_slice(block);
    aes.encrypt_block(ga);
}

fn decrypt_block(aes: &Aes128, block: &mut [u8; 16]) {
    let ga = aes::cipher::generic_array::GenericArray::from_mut_slice(block);
    aes.decrypt_block(ga);
}

/// CBC over whole blocks, updating `chain_iv` to the last ciphertext block.
fn cbc_encrypt(aes: &Aes128, chain_iv: &mut [u8; 16], data: &mut [u8]) {
    debug_assert_eq!(data.len() % AES_BLOCK, 0);
    let mut prev = *chain_iv;
    for chunk in data.chunks_exact_mut(AES_BLOCK) {
        let mut block: [u8; 16] = chunk.try_into().unwrap();
        xor_in_place(&mut block, &prev);
        encrypt_block(aes, &mut block);
        chunk.copy_from_slice(&block);
        prev = block;
    }
    *chain_iv = prev;
}

fn cbc_decrypt(aes: &Aes128, chain_iv: &mut [u8; 16], data: &mut [u8]) {
    debug_assert_eq!(data.len() % AES_BLOCK, 0);
    let mut prev = *chain_iv;
    for chunk in data.chunks_exact_mut(AES_BLOCK) {
        let ct: [u8; 16] = chunk.try_into().unwrap();
        let mut block = ct;
        decrypt_block(aes, &mut block);
        xor_in_place(&mut block, &prev);
        chunk.copy_from_slice(&block);
        prev = ct;
    }
    *chain_iv = prev;
}

fn ctr_keystream_block(aes: &Aes128, ctr: u128) -> [u8; 16] {
    let mut block = ctr.to_be_bytes();
    encrypt_block(aes, &mut block);
    block
}

/// XOR keystream over `data`, consuming one counter value per block. Partial
/// trailing blocks never occur because packets are block-aligned.
fn ctr_apply(aes: &Aes128, ctr: &mut u128, data: &mut [u8]) {
    debug_assert_eq!(data.len() % AES_BLOCK, 0);
    for chunk in data.chunks_exact_mut(AES_BLOCK) {
        let ks = ctr_keystream_block(aes, *ctr);
        *ctr = ctr.wrapping_add(1);
        for (b, k) in chunk.iter_mut().zip(ks.iter()) {
            *b ^= k;
        }
    }
}

fn hmac_over(mac_key: &[u8; 32], seqno: u32, parts: &[&[u8]]) -> [u8; 32] {
    let mut mac = <HmacSha256 as Mac>::new_from_slice(mac_key).expect("hmac key");
    mac.update(&seqno.to_be_bytes());
    for part in parts {
        mac.update(part);
    }
    mac.finalize().into_bytes().into()
}

fn gcm_nonce(fixed: &[u8; 4], invocation_ctr: u64) -> [u8; 12] {
    let mut nonce = [0u8; 12];
    nonce[..4].copy_from_slice(fixed);
    nonce[4..].copy_from_slice(&invocation_ctr.to_be_bytes());
    nonce
}

/// The packet nonce: 64-bit big-endian sequence number. The stream cipher
/// runs as the 32-bit-counter variant with a zero-extended 12-byte nonce,
/// which matches the 64-bit-counter original for all reachable offsets.
fn chacha_nonce(seqno: u32) -> [u8; 12] {
    let mut nonce = [0u8; 12];
    nonce[4..].copy_from_slice(&(seqno as u64).to_be_bytes());
    nonce
}

fn chacha_apply(key: &[u8; 32], seqno: u32, block_counter: u32, data: &mut [u8]) {
    let nonce = chacha_nonce(seqno);
    let mut cipher = ChaCha20::new(key.into(), (&nonce).into());
    cipher.seek(block_counter as u64 * 64);
    cipher.apply_keystream(data);
}

/// One-time Poly1305 key: first 32 keystream bytes of block zero.
fn chacha_poly_key(payload_key: &[u8; 32], seqno: u32) -> [u8; 32] {
    let mut key = [0u8; 32];
    chacha_apply(payload_key, seqno, 0, &mut key);
    key
}

fn poly1305_tag(key: &[u8; 32], data: &[u8]) -> [u8; 16] {
    let poly = Poly1305::new(poly1305::Key::from_slice(key));
    poly.compute_unpadded(data).into()
}
