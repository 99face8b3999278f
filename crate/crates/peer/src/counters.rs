//! Per-direction packet counters with a parameterizable modulus.
//!
//! Counters start at zero, advance by one per packet sent or received, and
//! wrap at `2^w`. They are never reset mid-connection; the only sanctioned
//! reset is the negotiated countermeasure at key activation.

/// Width of the counter space: counters live in `0 .. 2^w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqModulus {
    W16,
    W32,
}

impl SeqModulus {
    pub fn bits(self) -> u32 {
        match self {
            SeqModulus::W16 => 16,
            SeqModulus::W32 => 32,
        }
    }

    /// Number of counter values, as u64 so `2^32` fits.
    pub fn count(self) -> u64 {
        1u64 << self.bits()
    }

    pub fn from_bits(bits: u32) -> Option<Self> {
        match bits {
            16 => Some(SeqModulus::W16),
            32 => Some(SeqModulus::W32),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SequenceCounters {
    snd: u32,
    rcv: u32,
    modulus: SeqModulus,
}

impl SequenceCounters {
    pub fn new(modulus: SeqModulus) -> Self {
        Self {
            snd: 0,
            rcv: 0,
            modulus,
        }
    }

    pub fn snd(&self) -> u32 {
        self.snd
    }

    pub fn rcv(&self) -> u32 {
        self.rcv
    }

    pub fn modulus(&self) -> SeqModulus {
        self.modulus
    }

    /// Advance the send counter; true when it wrapped to zero.
    #[must_use]
    pub fn bump_snd(&mut self) -> bool {
        let (v, rolled) = bump(self.snd, self.modulus);
        self.snd = v;
        rolled
    }

    /// Advance the receive counter; true when it wrapped to zero.
    #[must_use]
    pub fn bump_rcv(&mut self) -> bool {
        let (v, rolled) = bump(self.rcv, self.modulus);
        self.rcv = v;
        rolled
    }

    /// Countermeasure reset at key activation.
    pub fn reset_snd(&mut self) {
        self.snd = 0;
    }

    pub fn reset_rcv(&mut self) {
        self.rcv = 0;
    }
}

fn bump(v: u32, modulus: SeqModulus) -> (u32, bool) {
    let next = (u64::from(v) + 1) % modulus.count();
    (next as u32, next == 0)
}
