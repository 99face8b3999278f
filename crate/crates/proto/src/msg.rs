//! Protocol messages: identifiers, bodies, and their byte-exact encodings.

use crate::wire::{Reader, WireError, WireResult, Writer};

/// Transport, authentication and extension message identifiers used by the lab.
pub mod id {
    pub const DISCONNECT: u8 = 1;
    pub const IGNORE: u8 = 2;
    pub const UNIMPLEMENTED: u8 = 3;
    pub const DEBUG: u8 = 4;
    pub const SERVICE_REQUEST: u8 = 5;
    pub const SERVICE_ACCEPT: u8 = 6;
    pub const EXT_INFO: u8 = 7;
    /// Channel-start transcript authenticator (unassigned transport range).
    pub const TRANSCRIPT_MAC: u8 = 8;
    pub const KEX_INIT: u8 = 20;
    pub const NEW_KEYS: u8 = 21;
    pub const KEX_DH_INIT: u8 = 30;
    pub const KEX_DH_REPLY: u8 = 31;
    pub const USERAUTH_REQUEST: u8 = 50;
    pub const USERAUTH_FAILURE: u8 = 51;
    pub const USERAUTH_SUCCESS: u8 = 52;
    pub const PING: u8 = 192;
    pub const PONG: u8 = 193;
}

/// Disconnect reason codes (subset).
pub mod disconnect_reason {
    pub const PROTOCOL_ERROR: u32 = 2;
    pub const KEY_EXCHANGE_FAILED: u32 = 3;
    pub const MAC_ERROR: u32 = 5;
    pub const SERVICE_NOT_AVAILABLE: u32 = 7;
    pub const BY_APPLICATION: u32 = 11;
    pub const ILLEGAL_USER_NAME: u32 = 15;
}

/// Algorithm negotiation payload: cookie, ten name-lists, guess flag, reserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KexInit {
    pub cookie: [u8; 16],
    pub kex_algorithms: Vec<String>,
    pub server_host_key_algorithms: Vec<String>,
    pub encryption_client_to_server: Vec<String>,
    pub encryption_server_to_client: Vec<String>,
    pub mac_client_to_server: Vec<String>,
    pub mac_server_to_client: Vec<String>,
    pub compression_client_to_server: Vec<String>,
    pub compression_server_to_client: Vec<String>,
    pub languages_client_to_server: Vec<String>,
    pub languages_server_to_client: Vec<String>,
    pub first_kex_packet_follows: bool,
    pub reserved: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuthMethod {
    /// `password` carries the secret directly.
    Password { password: String },
    /// Single-message public-key style method; modeled with a key blob that
    /// the server checks like a shared secret.
    PublicKey { blob: Vec<u8> },
}

impl AuthMethod {
    pub fn name(&self) -> &'static str {
        match self {
            AuthMethod::Password { .. } => "password",
            AuthMethod::PublicKey { .. } => "publickey",
        }
    }
}

/// One protocol message. `Unknown` carries an unrecognized identifier with its
/// raw body and is what attack scripts inject to provoke `Unimplemented`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Message {
    Disconnect {
        reason: u32,
        description: String,
        language: String,
    },
    Ignore {
        data: Vec<u8>,
    },
    Unimplemented {
        rejected_seq: u32,
    },
    Debug {
        always_display: bool,
        message: String,
        language: String,
    },
    ServiceRequest {
        name: String,
    },
    ServiceAccept {
        name: String,
    },
    ExtInfo {
        extensions: Vec<(String, Vec<u8>)>,
    },
    TranscriptMac {
        mac: Vec<u8>,
    },
    KexInit(KexInit),
    NewKeys,
    KexDhInit {
        e: Vec<u8>,
    },
    KexDhReply {
        host_key: Vec<u8>,
        f: Vec<u8>,
        signature: Vec<u8>,
    },
    UserAuthRequest {
        user: String,
        service: String,
        method: AuthMethod,
    },
    UserAuthFailure {
        methods: Vec<String>,
        partial_success: bool,
    },
    UserAuthSuccess,
    Ping {
        data: Vec<u8>,
    },
    Pong {
        data: Vec<u8>,
    },
    Unknown {
        id: u8,
        body: Vec<u8>,
    },
}

impl Message {
    pub fn id(&self) -> u8 {
        match self {
            Message::Disconnect { .. } => id::DISCONNECT,
            Message::Ignore { .. } => id::IGNORE,
            Message::Unimplemented { .. } => id::UNIMPLEMENTED,
            Message::Debug { .. } => id::DEBUG,
            Message::ServiceRequest { .. } => id::SERVICE_REQUEST,
            Message::ServiceAccept { .. } => id::SERVICE_ACCEPT,
            Message::ExtInfo { .. } => id::EXT_INFO,
            Message::TranscriptMac { .. } => id::TRANSCRIPT_MAC,
            Message::KexInit(_) => id::KEX_INIT,
            Message::NewKeys => id::NEW_KEYS,
            Message::KexDhInit { .. } => id::KEX_DH_INIT,
            Message::KexDhReply { .. } => id::KEX_DH_REPLY,
            Message::UserAuthRequest { .. } => id::USERAUTH_REQUEST,
            Message::UserAuthFailure { .. } => id::USERAUTH_FAILURE,
            Message::UserAuthSuccess => id::USERAUTH_SUCCESS,
            Message::Ping { .. } => id::PING,
            Message::Pong { .. } => id::PONG,
            Message::Unknown { id, .. } => *id,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Message::Disconnect { .. } => "Disconnect",
            Message::Ignore { .. } => "Ignore",
            Message::Unimplemented { .. } => "Unimplemented",
            Message::Debug { .. } => "Debug",
            Message::ServiceRequest { .. } => "ServiceRequest",
            Message::ServiceAccept { .. } => "ServiceAccept",
            Message::ExtInfo { .. } => "ExtInfo",
            Message::TranscriptMac { .. } => "TranscriptMac",
            Message::KexInit(_) => "KexInit",
            Message::NewKeys => "NewKeys",
            Message::KexDhInit { .. } => "KexDhInit",
            Message::KexDhReply { .. } => "KexDhReply",
            Message::UserAuthRequest { .. } => "UserAuthRequest",
            Message::UserAuthFailure { .. } => "UserAuthFailure",
            Message::UserAuthSuccess => "UserAuthSuccess",
            Message::Ping { .. } => "Ping",
            Message::Pong { .. } => "Pong",
            Message::Unknown { .. } => "Unknown",
        }
    }

    /// Encoded payload: message id byte followed by the body fields.
    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put_u8(self.id());
        match self {
            Message::Disconnect {
                reason,
                description,
                language,
            } => {
                w.put_u32(*reason);
                w.put_string(description.as_bytes());
                w.put_string(language.as_bytes());
            }
            Message::Ignore { data } => w.put_string(data),
            Message::Unimplemented { rejected_seq } => w.put_u32(*rejected_seq),
            Message::Debug {
                always_display,
                message,
                language,
            } => {
                w.put_bool(*always_display);
                w.put_string(message.as_bytes());
                w.put_string(language.as_bytes());
            }
            Message::ServiceRequest { name } => w.put_string(name.as_bytes()),
            Message::ServiceAccept { name } => w.put_string(name.as_bytes()),
            Message::ExtInfo { extensions } => {
                w.put_u32(extensions.len() as u32);
                for (name, value) in extensions {
                    w.put_string(name.as_bytes());
                    w.put_string(value);
                }
            }
            Message::TranscriptMac { mac } => w.put_string(mac),
            Message::KexInit(k) => {
                w.put_raw(&k.cookie);
                for list in [
                    &k.kex_algorithms,
                    &k.server_host_key_algorithms,
                    &k.encryption_client_to_server,
                    &k.encryption_server_to_client,
                    &k.mac_client_to_server,
                    &k.mac_server_to_client,
                    &k.compression_client_to_server,
                    &k.compression_server_to_client,
                    &k.languages_client_to_server,
                    &k.languages_server_to_client,
                ] {
                    w.put_name_list(list).expect("validated name list");
                }
                w.put_bool(k.first_kex_packet_follows);
                w.put_u32(k.reserved);
            }
            Message::NewKeys | Message::UserAuthSuccess => {}
            Message::KexDhInit { e } => w.put_mpint(e),
            Message::KexDhReply {
                host_key,
                f,
                signature,
            } => {
                w.put_string(host_key);
                w.put_mpint(f);
                w.put_string(signature);
            }
            Message::UserAuthRequest {
                user,
                service,
                method,
            } => {
                w.put_string(user.as_bytes());
                w.put_string(service.as_bytes());
                w.put_string(method.name().as_bytes());
                match method {
                    AuthMethod::Password { password } => {
                        w.put_bool(false);
                        w.put_string(password.as_bytes());
                    }
                    AuthMethod::PublicKey { blob } => {
                        w.put_bool(false);
                        w.put_string(blob);
                    }
                }
            }
            Message::UserAuthFailure {
                methods,
                partial_success,
            } => {
                w.put_name_list(methods).expect("validated name list");
                w.put_bool(*partial_success);
            }
            Message::Ping { data } | Message::Pong { data } => w.put_string(data),
            Message::Unknown { body, .. } => w.put_raw(body),
        }
        w.into_bytes()
    }

    /// Decode a payload whose id is recognized. Bodies must parse exactly;
    /// trailing bytes are an error. `lenient_service_accept` additionally
    /// admits a bare one-byte `ServiceAccept` with no service name.
    pub fn decode(payload: &[u8], lenient_service_accept: bool) -> WireResult<Message> {
        let mut r = Reader::new(payload);
        let msg_id = r.get_u8("message id")?;
        let msg = match msg_id {
            id::DISCONNECT => Message::Disconnect {
                reason: r.get_u32("reason")?,
                description: string_utf8(r.get_string("description")?)?,
                language: string_utf8(r.get_string("language")?)?,
            },
            id::IGNORE => Message::Ignore {
                data: r.get_string("data")?.to_vec(),
            },
            id::UNIMPLEMENTED => Message::Unimplemented {
                rejected_seq: r.get_u32("rejected seq")?,
            },
            id::DEBUG => Message::Debug {
                always_display: r.get_bool("always_display")?,
                message: string_utf8(r.get_string("message")?)?,
                language: string_utf8(r.get_string("language")?)?,
            },
            id::SERVICE_REQUEST => Message::ServiceRequest {
                name: string_utf8(r.get_string("service name")?)?,
            },
            id::SERVICE_ACCEPT => {
                if r.is_empty() && lenient_service_accept {
                    Message::ServiceAccept {
                        name: String::new(),
                    }
                } else {
                    Message::ServiceAccept {
                        name: string_utf8(r.get_string("service name")?)?,
                    }
                }
            }
            id::EXT_INFO => {
                let count = r.get_u32("extension count")?;
                // each entry needs at least two length prefixes
                if count as usize > payload.len() / 8 + 1 {
                    return Err(WireError::BadStringLength(count));
                }
                let mut extensions = Vec::with_capacity(count as usize);
                for _ in 0..count {
                    let name = string_utf8(r.get_string("extension name")?)?;
                    let value = r.get_string("extension value")?.to_vec();
                    extensions.push((name, value));
                }
                Message::ExtInfo { extensions }
            }
            id::TRANSCRIPT_MAC => Message::TranscriptMac {
                mac: r.get_string("mac")?.to_vec(),
            },
            id::KEX_INIT => {
                let cookie_bytes = r.take(16, "cookie")?;
                let mut cookie = [0u8; 16];
                cookie.copy_from_slice(cookie_bytes);
                Message::KexInit(KexInit {
                    cookie,
                    kex_algorithms: r.get_name_list("kex algorithms")?,
                    server_host_key_algorithms: r.get_name_list("host key algorithms")?,
                    encryption_client_to_server: r.get_name_list("enc c2s")?,
                    encryption_server_to_client: r.get_name_list("enc s2c")?,
                    mac_client_to_server: r.get_name_list("mac c2s")?,
                    mac_server_to_client: r.get_name_list("mac s2c")?,
                    compression_client_to_server: r.get_name_list("comp c2s")?,
                    compression_server_to_client: r.get_name_list("comp s2c")?,
                    languages_client_to_server: r.get_name_list("lang c2s")?,
                    languages_server_to_client: r.get_name_list("lang s2c")?,
                    first_kex_packet_follows: r.get_bool("guess flag")?,
                    reserved: r.get_u32("reserved")?,
                })
            }
            id::NEW_KEYS => Message::NewKeys,
            id::KEX_DH_INIT => Message::KexDhInit {
                e: r.get_mpint("e")?.to_vec(),
            },
            id::KEX_DH_REPLY => Message::KexDhReply {
                host_key: r.get_string("host key")?.to_vec(),
                f: r.get_mpint("f")?.to_vec(),
                signature: r.get_string("signature")?.to_vec(),
            },
            id::USERAUTH_REQUEST => {
                let user = string_utf8(r.get_string("user")?)?;
                let service = string_utf8(r.get_string("service")?)?;
                let method_name = string_utf8(r.get_string("method")?)?;
                let _more = r.get_bool("method flag")?;
                let secret = r.get_string("method secret")?;
                let method = match method_name.as_str() {
                    "password" => AuthMethod::Password {
                        password: string_utf8(secret)?,
                    },
                    _ => AuthMethod::PublicKey {
                        blob: secret.to_vec(),
                    },
                };
                Message::UserAuthRequest {
                    user,
                    service,
                    method,
                }
            }
            id::USERAUTH_FAILURE => Message::UserAuthFailure {
                methods: r.get_name_list("methods")?,
                partial_success: r.get_bool("partial success")?,
            },
            id::USERAUTH_SUCCESS => Message::UserAuthSuccess,
            id::PING => Message::Ping {
                data: r.get_string("ping data")?.to_vec(),
            },
            id::PONG => Message::Pong {
                data: r.get_string("pong data")?.to_vec(),
            },
            other => Message::Unknown {
                id: other,
                body: r.take_rest().to_vec(),
            },
        };
        r.finish()?;
        Ok(msg)
    }
}

fn string_utf8(bytes: &[u8]) -> WireResult<String> {
    String::from_utf8(bytes.to_vec()).map_err(|_| WireError::NonAsciiNameList)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ignore_round_trip() {
        let m = Message::Ignore { data: vec![1, 2, 3] };
        assert_eq!(Message::decode(&m.encode(), false).unwrap(), m);
    }

    #[test]
    fn service_accept_lenient_one_byte() {
        let payload = [id::SERVICE_ACCEPT];
        assert_eq!(
            Message::decode(&payload, true).unwrap(),
            Message::ServiceAccept {
                name: String::new()
            }
        );
        assert!(Message::decode(&payload, false).is_err());
    }

    #[test]
    fn trailing_bytes_rejected() {
        let mut payload = Message::NewKeys.encode();
        payload.push(0);
        assert_eq!(
            Message::decode(&payload, false),
            Err(WireError::TrailingBytes)
        );
    }

    #[test]
    fn unknown_id_keeps_raw_body() {
        let m = Message::Unknown {
            id: 200,
            body: vec![9, 9, 9],
        };
        let enc = m.encode();
        assert_eq!(enc[0], 200);
        assert_eq!(Message::decode(&enc, false).unwrap(), m);
    }
}
