//! Protocol version banners exchanged before any packet.

use thiserror::Error;

pub const BANNER_PREFIX: &str = "SSH-2.0-";
/// Maximum banner line on the wire, CR LF included.
pub const MAX_BANNER_LINE: usize = 255;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum BannerError {
    #[error("banner does not start with SSH-2.0-")]
    BadPrefix,
    #[error("banner contains CR or LF")]
    EmbeddedLineBreak,
    #[error("banner line exceeds {MAX_BANNER_LINE} bytes")]
    TooLong,
    #[error("banner line not terminated with CR LF")]
    MissingTerminator,
}

/// A validated identification line, stored without the trailing CR LF.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VersionBanner {
    text: String,
}

impl VersionBanner {
    pub fn new(text: impl Into<String>) -> Result<Self, BannerError> {
        let text = text.into();
        if !text.starts_with(BANNER_PREFIX) {
            return Err(BannerError::BadPrefix);
        }
        if text.contains('\r') || text.contains('\n') {
            return Err(BannerError::EmbeddedLineBreak);
        }
        if text.len() + 2 > MAX_BANNER_LINE {
            return Err(BannerError::TooLong);
        }
        Ok(Self { text })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.text.as_bytes()
    }

    /// Wire form: the line followed by CR LF.
    pub fn wire_line(&self) -> Vec<u8> {
        let mut v = Vec::with_capacity(self.text.len() + 2);
        v.extend_from_slice(self.text.as_bytes());
        v.extend_from_slice(b"\r\n");
        v
    }

    /// Parse one CR LF terminated line from the start of `buf`. Returns the
    /// banner and the number of bytes consumed, or `Ok(None)` if the line is
    /// still incomplete.
    pub fn parse_line(buf: &[u8]) -> Result<Option<(Self, usize)>, BannerError> {
        match buf.windows(2).position(|w| w == b"\r\n") {
            Some(pos) => {
                if pos + 2 > MAX_BANNER_LINE {
                    return Err(BannerError::TooLong);
                }
                let text = String::from_utf8(buf[..pos].to_vec())
                    .map_err(|_| BannerError::BadPrefix)?;
                Ok(Some((Self::new(text)?, pos + 2)))
            }
            None if buf.len() >= MAX_BANNER_LINE => Err(BannerError::MissingTerminator),
            None => Ok(None),
        }
    }
}

impl std::fmt::Display for VersionBanner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.text)
    }
}
