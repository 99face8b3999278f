//! Key exchange and algorithm negotiation: the 2048-bit MODP group,
//! exchange hash computation, host-key signatures, and the first-match
//! negotiation rule including indicator names for extension and
//! countermeasure signaling.

use ed25519_dalek::{Signature, Signer, SigningKey, Verifier, VerifyingKey};
use num_bigint::BigUint;

use rand::RngCore;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::banner::VersionBanner;
use crate::msg::KexInit;
use crate::wire::{encode_mpint, Writer};

/// 2048-bit MODP group (group 14): prime and generator.
pub const GROUP14_PRIME_HEX: &str = concat!(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74",
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437",
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED",
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05",
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB",
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B",
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718",
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF",
);

pub fn group14_prime() -> BigUint {
    BigUint::parse_bytes(GROUP14_PRIME_HEX.as_bytes(), 16).expect("group prime")
}

pub fn group14_generator() -> BigUint {
    BigUint::from(2u8)
}

/// Ephemeral exponent width. Short exponents keep desk-scale experiment
/// counts fast while leaving the exchange far above the work factor of the
/// group itself.
pub const EPHEMERAL_EXPONENT_BITS: usize = 512;

pub const KEX_NAME: &str = "diffie-hellman-group14-sha256";
pub const HOST_KEY_NAME: &str = "ssh-ed25519";
pub const COMPRESSION_NONE: &str = "none";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KexError {
    #[error("no common {0} algorithm")]
    NoCommonAlgorithm(&'static str),
    #[error("public value out of range [2, p-2]")]
    PublicValueOutOfRange,
    #[error("host key blob malformed")]
    BadHostKeyBlob,
    #[error("host signature rejected")]
    SignatureRejected,
}

/// Indicator names carried in the kex algorithm list. They signal feature
/// support and are never negotiated as key exchange algorithms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorNames {
    pub ext_info_client: String,
    pub ext_info_server: String,
    pub seq_reset_client: String,
    pub seq_reset_server: String,
    pub transcript_mac_client: String,
    pub transcript_mac_server: String,
}

impl Default for IndicatorNames {
    fn default() -> Self {
        Self {
            ext_info_client: "ext-info-c".into(),
            ext_info_server: "ext-info-s".into(),
            seq_reset_client: "seq-reset-c".into(),
            seq_reset_server: "seq-reset-s".into(),
            transcript_mac_client: "xmac-c".into(),
            transcript_mac_server: "xmac-s".into(),
        }
    }
}

impl IndicatorNames {
    fn all(&self) -> [&str; 6] {
        [
            &self.ext_info_client,
            &self.ext_info_server,
            &self.seq_reset_client,
            &self.seq_reset_server,
            &self.transcript_mac_client,
            &self.transcript_mac_server,
        ]
    }
}

/// Outcome of algorithm negotiation; identical on both peers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegotiationResult {
    pub kex_algorithm: String,
    pub host_key_algorithm: String,
    pub cipher_client_to_server: String,
    pub cipher_server_to_client: String,
    pub mac_client_to_server: Option<String>,
    pub mac_server_to_client: Option<String>,
    /// Client offered the extension-negotiation indicator.
    pub ext_info_client: bool,
    /// Server offered the extension-negotiation indicator.
    pub ext_info_server: bool,
    /// Both peers signaled the sequence-number reset countermeasure.
    pub seq_reset_enabled: bool,
    /// Both peers signaled the transcript authentication countermeasure.
    pub transcript_mac_enabled: bool,
}

fn first_match(
    client: &[String],
    server: &[String],
    skip: &[&str],
    what: &'static str,
) -> Result<String, KexError> {
    client
        .iter()
        .filter(|c| !skip.contains(&c.as_str()))
        .find(|c| server.iter().any(|s| s == *c))
        .cloned()
        .ok_or(KexError::NoCommonAlgorithm(what))
}

fn mac_needed(cipher: &str) -> bool {
    !matches!(cipher, "aes128-gcm@openssh.com" | "chacha20-poly1305@openssh.com")
}

/// The first client algorithm in each list that the server also offers.
/// Indicator names are consumed as feature flags, never as algorithms.
pub fn negotiate(
    client: &KexInit,
    server: &KexInit,
    indicators: &IndicatorNames,
) -> Result<NegotiationResult, KexError> {
    let skip = indicators.all();
    let kex_algorithm = first_match(
        &client.kex_algorithms,
        &server.kex_algorithms,
        &skip,
        "key exchange",
    )?;
    let host_key_algorithm = first_match(
        &client.server_host_key_algorithms,
        &server.server_host_key_algorithms,
        &[],
        "host key",
    )?;
    let cipher_client_to_server = first_match(
        &client.encryption_client_to_server,
        &server.encryption_client_to_server,
        &[],
        "cipher c2s",
    )?;
    let cipher_server_to_client = first_match(
        &client.encryption_server_to_client,
        &server.encryption_server_to_client,
        &[],
        "cipher s2c",
    )?;
    let mac_client_to_server = if mac_needed(&cipher_client_to_server) {
        Some(first_match(
            &client.mac_client_to_server,
            &server.mac_client_to_server,
            &[],
            "mac c2s",
        )?)
    } else {
        None
    };
    let mac_server_to_client = if mac_needed(&cipher_server_to_client) {
        Some(first_match(
            &client.mac_server_to_client,
            &server.mac_server_to_client,
            &[],
            "mac s2c",
        )?)
    } else {
        None
    };
    let has = |list: &[String], name: &str| list.iter().any(|n| n == name);
    Ok(NegotiationResult {
        kex_algorithm,
        host_key_algorithm,
        cipher_client_to_server,
        cipher_server_to_client,
        mac_client_to_server,
        mac_server_to_client,
        ext_info_client: has(&client.kex_algorithms, &indicators.ext_info_client),
        ext_info_server: has(&server.kex_algorithms, &indicators.ext_info_server),
        seq_reset_enabled: has(&client.kex_algorithms, &indicators.seq_reset_client)
            && has(&server.kex_algorithms, &indicators.seq_reset_server),
        transcript_mac_enabled: has(&client.kex_algorithms, &indicators.transcript_mac_client)
            && has(&server.kex_algorithms, &indicators.transcript_mac_server),
    })
}

/// Draw an ephemeral exponent and compute the public value `g^x mod p`.
pub fn dh_ephemeral(rng: &mut dyn RngCore) -> (BigUint, BigUint) {
    let p = group14_prime();
    let g = group14_generator();
    let mut bytes = vec![0u8; EPHEMERAL_EXPONENT_BITS / 8];
    loop {
        rng.fill_bytes(&mut bytes);
        let x = BigUint::from_bytes_be(&bytes);
        if x >= BigUint::from(2u8) {
            let public = g.modpow(&x, &p);
            return (x, public);
        }
    }
}

/// Validate a received public value and compute the shared secret.
pub fn dh_shared_secret(own_exponent: &BigUint, peer_public: &BigUint) -> Result<BigUint, KexError> {
    let p = group14_prime();
    let two = BigUint::from(2u8);
    if peer_public < &two || peer_public > &(&p - &two) {
        return Err(KexError::PublicValueOutOfRange);
    }
    Ok(peer_public.modpow(own_exponent, &p))
}

/// The fields entering the exchange hash, each length-prefixed exactly once.
#[derive(Debug, Clone)]
pub struct TranscriptInputs {
    pub client_banner: VersionBanner,
    pub server_banner: VersionBanner,
    /// Encoded KexInit payload sent by the client.
    pub client_kexinit_payload: Vec<u8>,
    /// Encoded KexInit payload sent by the server.
    pub server_kexinit_payload: Vec<u8>,
    /// Encoded host public key blob.
    pub host_key_blob: Vec<u8>,
    pub client_public: BigUint,
    pub server_public: BigUint,
    pub shared_secret: BigUint,
}

/// `H = HASH(V_C ‖ V_S ‖ I_C ‖ I_S ‖ K_S ‖ e ‖ f ‖ K)`.
pub fn exchange_hash(t: &TranscriptInputs) -> [u8; 32] {
    let mut w = Writer::new();
    w.put_string(t.client_banner.as_bytes());
    w.put_string(t.server_banner.as_bytes());
    w.put_string(&t.client_kexinit_payload);
    w.put_string(&t.server_kexinit_payload);
    w.put_string(&t.host_key_blob);
    w.put_mpint(&t.client_public.to_bytes_be());
    w.put_mpint(&t.server_public.to_bytes_be());
    w.put_mpint(&t.shared_secret.to_bytes_be());
    let digest = Sha256::digest(w.into_bytes());
    digest.into()
}

/// Host keypair for server authentication.
#[derive(Debug, Clone)]
pub struct HostKeypair {
    signing: SigningKey,
}

impl HostKeypair {
    pub fn from_seed(seed: [u8; 32]) -> Self {
        Self {
            signing: SigningKey::from_bytes(&seed),
        }
    }

    pub fn generate(rng: &mut dyn RngCore) -> Self {
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        Self::from_seed(seed)
    }

    /// `string name ‖ string public key bytes`.
    pub fn public_blob(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put_string(HOST_KEY_NAME.as_bytes());
        w.put_string(self.signing.verifying_key().as_bytes());
        w.into_bytes()
    }

    /// `string name ‖ string signature bytes` over the exchange hash.
    pub fn sign(&self, exchange_hash: &[u8]) -> Vec<u8> {
        let sig = self.signing.sign(exchange_hash);
        let mut w = Writer::new();
        w.put_string(HOST_KEY_NAME.as_bytes());
        w.put_string(&sig.to_bytes());
        w.into_bytes()
    }
}

/// Verify a signature blob over the exchange hash against a host key blob.
pub fn verify_host_signature(
    host_key_blob: &[u8],
    exchange_hash: &[u8],
    signature_blob: &[u8],
) -> Result<(), KexError> {
    let mut r = crate::wire::Reader::new(host_key_blob);
    let name = r.get_string("key name").map_err(|_| KexError::BadHostKeyBlob)?;
    let key_bytes = r.get_string("key bytes").map_err(|_| KexError::BadHostKeyBlob)?;
    if name != HOST_KEY_NAME.as_bytes() || !r.is_empty() {
        return Err(KexError::BadHostKeyBlob);
    }
    let key: [u8; 32] = key_bytes.try_into().map_err(|_| KexError::BadHostKeyBlob)?;
    let verifying = VerifyingKey::from_bytes(&key).map_err(|_| KexError::BadHostKeyBlob)?;

    let mut r = crate::wire::Reader::new(signature_blob);
    let sig_name = r.get_string("sig name").map_err(|_| KexError::SignatureRejected)?;
    let sig_bytes = r.get_string("sig bytes").map_err(|_| KexError::SignatureRejected)?;
    if sig_name != HOST_KEY_NAME.as_bytes() || !r.is_empty() {
        return Err(KexError::SignatureRejected);
    }
    let sig_arr: [u8; 64] = sig_bytes.try_into().map_err(|_| KexError::SignatureRejected)?;
    let signature = Signature::from_bytes(&sig_arr);
    verifying
        .verify(exchange_hash, &signature)
        .map_err(|_| KexError::SignatureRejected)
}

/// Range check used on both ends of the exchange.
pub fn public_value_in_range(v: &BigUint) -> bool {
    let p = group14_prime();
    let two = BigUint::from(2u8);
    *v >= two && *v <= &p - BigUint::from(2u8)
}

/// mpint encoding of a big integer, exposed for hash and wire assembly.
pub fn mpint_of(v: &BigUint) -> Vec<u8> {
    encode_mpint(&v.to_bytes_be())
}
