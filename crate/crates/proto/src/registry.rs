//! Registry of message identifiers a peer recognizes.
//!
//! The default profile contains exactly 43 identifiers: the core transport,
//! authentication and connection numbers from the base protocol plus common
//! vendor and extension assignments. The exact membership is a calibrated
//! stand-in for what fielded implementations accept; what matters for the
//! experiments is the count, which fixes the unrecognized-id share at
//! 213 out of 256. Alternative registries can be loaded from a file.

use std::collections::BTreeSet;
use std::path::Path;

/// Core ids from the base protocol suite (transport, userauth, connection).
const CORE_IDS: &[u8] = &[
    1, 2, 3, 4, 5, 6, // transport: disconnect .. service accept
    20, 21, // kexinit, newkeys
    30, 31, // kex method range: dh init/reply
    50, 51, 52, 53, // userauth request/failure/success/banner
    60, 61, // userauth method-specific
    80, 81, 82, // global requests
    90, 91, 92, 93, 94, 95, 96, 97, 98, 99, 100, // channel messages
];

/// Extension and vendor assignments (ext-info, ping/pong, transcript
/// authenticator, kex and auth method extras).
const EXTENSION_IDS: &[u8] = &[7, 8, 192, 193, 32, 33, 34, 62, 63, 64, 65, 66, 194];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageIdRegistry {
    known: BTreeSet<u8>,
}

impl Default for MessageIdRegistry {
    fn default() -> Self {
        let known: BTreeSet<u8> = CORE_IDS
            .iter()
            .chain(EXTENSION_IDS.iter())
            .copied()
            .collect();
        debug_assert_eq!(known.len(), 43);
        Self { known }
    }
}

impl MessageIdRegistry {
    pub fn from_ids(ids: impl IntoIterator<Item = u8>) -> Self {
        Self {
            known: ids.into_iter().collect(),
        }
    }

    /// Every id recognized; unrecognized count is zero.
    pub fn all_known() -> Self {
        Self::from_ids(0..=255)
    }

    /// Parse a registry file: one id per line, decimal, `#` comments allowed.
    pub fn load(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut known = BTreeSet::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let id: u8 = line.parse().map_err(|e| {
                std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("line {}: {e}", lineno + 1),
                )
            })?;
            known.insert(id);
        }
        Ok(Self { known })
    }

    pub fn contains(&self, id: u8) -> bool {
        self.known.contains(&id)
    }

    pub fn known_count(&self) -> usize {
        self.known.len()
    }

    pub fn unknown_count(&self) -> usize {
        256 - self.known.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = u8> + '_ {
        self.known.iter().copied()
    }
}
