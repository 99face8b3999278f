//! Transport-layer protocol laboratory: byte-exact binary packet codec, the
//! six authenticated encryption modes, and handshake primitives (algorithm
//! negotiation, finite-field key exchange, exchange hash, host signatures,
//! transcript authentication).
//!
//! Everything here is deterministic given its inputs; randomness is always
//! injected by the caller.

pub mod banner;
pub mod cipher;
pub mod kdf;
pub mod kex;
pub mod msg;
pub mod packet;
pub mod registry;
pub mod transcript;
pub mod wire;

/// Direction of a packet flow between the two peers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    ClientToServer,
    ServerToClient,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::ClientToServer => Direction::ServerToClient,
            Direction::ServerToClient => Direction::ClientToServer,
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            Direction::ClientToServer => "C->S",
            Direction::ServerToClient => "S->C",
        }
    }
}

/// Protocol role of a peer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Client,
    Server,
}

impl Role {
    pub fn send_direction(self) -> Direction {
        match self {
            Role::Client => Direction::ClientToServer,
            Role::Server => Direction::ServerToClient,
        }
    }

    pub fn recv_direction(self) -> Direction {
        self.send_direction().flip()
    }
}
