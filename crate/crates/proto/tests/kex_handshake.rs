//! Key exchange, exchange hash, negotiation and host signature checks.

use bpplab_proto::banner::VersionBanner;
use bpplab_proto::kex::{
    self, dh_ephemeral, dh_shared_secret, exchange_hash, group14_generator, group14_prime,
    negotiate, HostKeypair, IndicatorNames, KexError, TranscriptInputs,
};
use bpplab_proto::msg::KexInit;
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Independent square-and-multiply oracle, deliberately avoiding the
/// library modpow used by the implementation.
fn modexp_oracle(base: &BigUint, exponent: u64, modulus: &BigUint) -> BigUint {
    let mut result = BigUint::from(1u8);
    let mut acc = base % modulus;
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            result = (&result * &acc) % modulus;
        }
        acc = (&acc * &acc) % modulus;
        e >>= 1;
    }
    result
}

#[test]
fn dh_fixed_exponents_match_oracle() {
    let p = group14_prime();
    let g = group14_generator();
    // a = 2, b = 3 -> K = g^6 mod p
    let a = BigUint::from(2u8);
    let b = BigUint::from(3u8);
    let e = g.modpow(&a, &p);
    let f = g.modpow(&b, &p);
    let k_client = dh_shared_secret(&a, &f).unwrap();
    let k_server = dh_shared_secret(&b, &e).unwrap();
    let expected = modexp_oracle(&g, 6, &p);
    assert_eq!(k_client, expected);
    assert_eq!(k_server, expected);
}

#[test]
fn dh_rejects_out_of_range_public() {
    let a = BigUint::from(5u8);
    assert_eq!(
        dh_shared_secret(&a, &BigUint::from(1u8)).unwrap_err(),
        KexError::PublicValueOutOfRange
    );
    let p = group14_prime();
    assert_eq!(
        dh_shared_secret(&a, &(&p - BigUint::from(1u8))).unwrap_err(),
        KexError::PublicValueOutOfRange
    );
    assert!(!kex::public_value_in_range(&BigUint::from(1u8)));
}

#[test]
fn dh_random_exponents_agree_100_trials() {
    let mut rng = ChaCha12Rng::seed_from_u64(77);
    for _ in 0..100 {
        let (a, e) = dh_ephemeral(&mut rng);
        let (b, f) = dh_ephemeral(&mut rng);
        assert_eq!(
            dh_shared_secret(&a, &f).unwrap(),
            dh_shared_secret(&b, &e).unwrap()
        );
    }
}

fn sample_inputs() -> TranscriptInputs {
    TranscriptInputs {
        client_banner: VersionBanner::new("SSH-2.0-client").unwrap(),
        server_banner: VersionBanner::new("SSH-2.0-server").unwrap(),
        client_kexinit_payload: vec![20, 1, 2, 3],
        server_kexinit_payload: vec![20, 4, 5, 6],
        host_key_blob: vec![9, 9],
        client_public: BigUint::from(0xAAAAu32),
        server_public: BigUint::from(0xBBBBu32),
        shared_secret: BigUint::from(0xCCCCu32),
    }
}

#[test]
fn exchange_hash_deterministic_and_sensitive() {
    let t = sample_inputs();
    assert_eq!(exchange_hash(&t), exchange_hash(&t));
    let mut flipped = sample_inputs();
    flipped.client_kexinit_payload[1] ^= 1;
    assert_ne!(exchange_hash(&t), exchange_hash(&flipped));
}

#[test]
fn host_signature_round_trip_and_rejections() {
    let keypair = HostKeypair::from_seed([7u8; 32]);
    let h = exchange_hash(&sample_inputs());
    let blob = keypair.public_blob();
    let sig = keypair.sign(&h);
    kex::verify_host_signature(&blob, &h, &sig).unwrap();

    let mut h_bad = h;
    h_bad[0] ^= 0x01;
    assert_eq!(
        kex::verify_host_signature(&blob, &h_bad, &sig).unwrap_err(),
        KexError::SignatureRejected
    );

    let other = HostKeypair::from_seed([8u8; 32]);
    assert_eq!(
        kex::verify_host_signature(&other.public_blob(), &h, &sig).unwrap_err(),
        KexError::SignatureRejected
    );
}

fn kexinit(kex: &[&str], enc: &[&str], mac: &[&str]) -> KexInit {
    let list = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    KexInit {
        cookie: [0u8; 16],
        kex_algorithms: list(kex),
        server_host_key_algorithms: list(&["ssh-ed25519"]),
        encryption_client_to_server: list(enc),
        encryption_server_to_client: list(enc),
        mac_client_to_server: list(mac),
        mac_server_to_client: list(mac),
        compression_client_to_server: list(&["none"]),
        compression_server_to_client: list(&["none"]),
        languages_client_to_server: vec![],
        languages_server_to_client: vec![],
        first_kex_packet_follows: false,
        reserved: 0,
    }
}

#[test]
fn negotiation_client_preference_wins() {
    let ind = IndicatorNames::default();
    let client = kexinit(
        &["diffie-hellman-group14-sha256"],
        &["chacha20-poly1305@openssh.com", "aes128-ctr"],
        &["hmac-sha2-256"],
    );
    let server = kexinit(
        &["diffie-hellman-group14-sha256"],
        &["aes128-ctr", "chacha20-poly1305@openssh.com"],
        &["hmac-sha2-256"],
    );
    let r = negotiate(&client, &server, &ind).unwrap();
    assert_eq!(r.cipher_client_to_server, "chacha20-poly1305@openssh.com");
    assert_eq!(r.mac_client_to_server, None);
    // identical result regardless of which peer evaluates it
    assert_eq!(r, negotiate(&client, &server, &ind).unwrap());
}

#[test]
fn negotiation_indicators_are_not_algorithms() {
    let ind = IndicatorNames::default();
    let client = kexinit(
        &["ext-info-c", "seq-reset-c", "diffie-hellman-group14-sha256"],
        &["aes128-ctr"],
        &["hmac-sha2-256"],
    );
    let server = kexinit(
        &["diffie-hellman-group14-sha256", "ext-info-s"],
        &["aes128-ctr"],
        &["hmac-sha2-256"],
    );
    let r = negotiate(&client, &server, &ind).unwrap();
    assert_eq!(r.kex_algorithm, "diffie-hellman-group14-sha256");
    assert!(r.ext_info_client);
    assert!(r.ext_info_server);
    // only the client offered seq-reset: the countermeasure stays off
    assert!(!r.seq_reset_enabled);
    assert!(!r.transcript_mac_enabled);
}

#[test]
fn negotiation_failure_without_common_cipher() {
    let ind = IndicatorNames::default();
    let client = kexinit(
        &["diffie-hellman-group14-sha256"],
        &["chacha20-poly1305@openssh.com"],
        &["hmac-sha2-256"],
    );
    let server = kexinit(
        &["diffie-hellman-group14-sha256"],
        &["aes128-ctr"],
        &["hmac-sha2-256"],
    );
    assert_eq!(
        negotiate(&client, &server, &ind).unwrap_err(),
        KexError::NoCommonAlgorithm("cipher c2s")
    );
}
