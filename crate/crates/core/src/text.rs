//! Turkish-aware casing and output normalization.

use unicode_normalization::UnicodeNormalization;

/// Uppercases the first character, with dotted/dotless i handled the
/// Turkish way.
pub fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        None => String::new(),
        Some(c) => {
            let upper: String = match c {
                'i' => "İ".into(),
                'ı' => "I".into(),
                c => c.to_uppercase().collect(),
            };
            upper + chars.as_str()
        }
    }
}

pub fn nfc(s: &str) -> String {
    s.nfc().collect()
}
