//! Session key derivation from the shared secret and exchange hash.
//!
//! Key material for letter X is `HASH(mpint(K) ‖ H ‖ X ‖ session_id)`,
//! extended with `HASH(mpint(K) ‖ H ‖ K1 ‖ ... ‖ Kn)` until long enough.

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use crate::cipher::{DirectionalCipherState, ModeId};
use crate::wire::encode_mpint;
use crate::Direction;

fn derive_letter(k_mpint: &[u8], h: &[u8], session_id: &[u8], letter: u8, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len.max(32));
    let mut hasher = Sha256::new();
    hasher.update(k_mpint);
    hasher.update(h);
    hasher.update([letter]);
    hasher.update(session_id);
    out.extend_from_slice(&hasher.finalize());
    while out.len() < len {
        let mut hasher = Sha256::new();
        hasher.update(k_mpint);
        hasher.update(h);
        hasher.update(&out);
        let next = hasher.finalize();
        out.extend_from_slice(&next);
    }
    out.truncate(len);
    out
}

/// IV, encryption and MAC letters for one direction.
fn letters(direction: Direction) -> (u8, u8, u8) {
    match direction {
        Direction::ClientToServer => (b'A', b'C', b'E'),
        Direction::ServerToClient => (b'B', b'D', b'F'),
    }
}

/// Derive the keyed (but inactive) cipher state for one direction. Both
/// peers calling this with the same inputs obtain byte-identical states.
pub fn derive_directional_keys(
    shared_secret: &BigUint,
    exchange_hash: &[u8],
    session_id: &[u8],
    mode: ModeId,
    direction: Direction,
) -> DirectionalCipherState {
    assert!(!exchange_hash.is_empty(), "exchange hash required");
    assert!(!session_id.is_empty(), "session id required");
    let k_mpint = encode_mpint(&shared_secret.to_bytes_be());
    let (iv_letter, key_letter, mac_letter) = letters(direction);
    let iv = derive_letter(&k_mpint, exchange_hash, session_id, iv_letter, mode.iv_len());
    let key = derive_letter(
        &k_mpint,
        exchange_hash,
        session_id,
        key_letter,
        mode.key_len(),
    );
    let mac_key = derive_letter(
        &k_mpint,
        exchange_hash,
        session_id,
        mac_letter,
        mode.mac_key_len(),
    );
    DirectionalCipherState::from_key_material(mode, &key, &iv, &mac_key)
}

/// Key for the channel-start transcript authenticator, bound to the session
/// under its own label.
pub fn derive_transcript_mac_key(
    shared_secret: &BigUint,
    exchange_hash: &[u8],
    session_id: &[u8],
) -> [u8; 32] {
    let k_mpint = encode_mpint(&shared_secret.to_bytes_be());
    derive_letter(&k_mpint, exchange_hash, session_id, b'T', 32)
        .try_into()
        .expect("32 bytes")
}
