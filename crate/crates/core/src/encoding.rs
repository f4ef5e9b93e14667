//! Percent-encoding of page names for URLs, URIs and file names.

use std::borrow::Cow;

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

/// Everything except RFC 3986 unreserved characters.
const SEGMENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

/// File names keep only alphanumerics, `-` and `_`, so no encoded name can
/// start with a dot or collide with the `.txt` suffix.
const FILE: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_');

pub fn encode_segment(s: &str) -> String {
    utf8_percent_encode(s, SEGMENT).to_string()
}

pub fn encode_file_stem(s: &str) -> String {
    utf8_percent_encode(s, FILE).to_string()
}

/// Inverse of both encoders. `None` when the bytes are not UTF-8.
pub fn decode(s: &str) -> Option<String> {
    match percent_decode_str(s).decode_utf8() {
        Ok(Cow::Borrowed(b)) => Some(b.to_string()),
        Ok(Cow::Owned(o)) => Some(o),
        Err(_) => None,
    }
}
