//! Validators over generated word forms. They re-derive each invariant
//! from the surface string and the recorded suffix templates, without
//! calling back into the generator.

use super::{is_front, is_rounded, is_vowel, is_voiceless, lower, WordForm};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub word: String,
    pub suffix: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} [{}]: {}", self.word, self.suffix, self.message)
    }
}

/// Template characters aligned with the surface characters of a suffix.
/// The buffer is kept when the surface is as long as the template with
/// the buffer included.
struct Aligned {
    buffer: Option<char>,
    buffer_kept: bool,
    pairs: Vec<(char, char)>,
}

fn align(template: &str, surface: &str) -> Option<Aligned> {
    let (buffer, body) = match template.strip_prefix('(') {
        Some(rest) => {
            let close = rest.find(')')?;
            (rest[..close].chars().next(), &rest[close + 1..])
        }
        None => (None, template),
    };
    let body: Vec<char> = body.chars().collect();
    let surf: Vec<char> = surface.chars().collect();
    let (kept, tpl) = match buffer {
        Some(b) if surf.len() == body.len() + 1 => (true, std::iter::once(b).chain(body.iter().copied()).collect::<Vec<_>>()),
        _ => (false, body),
    };
    // a suffix may lose its final vowel to a following Iyor
    if surf.len() > tpl.len() || tpl.len() - surf.len() > 1 {
        return None;
    }
    let pairs = tpl.iter().copied().zip(surf.iter().copied()).collect();
    Some(Aligned { buffer, buffer_kept: kept, pairs })
}

/// Walks the word and calls `f(prefix_so_far, segment_index, aligned)` per
/// non-empty suffix.
fn walk(form: &WordForm, mut f: impl FnMut(&str, usize, &Aligned) -> Result<(), String>) -> Vec<Violation> {
    let mut out = Vec::new();
    if form.irregular {
        return out;
    }
    let mut prefix = form.stem.to_lowercase();
    for (i, seg) in form.suffixes.iter().enumerate() {
        if seg.surface.is_empty() {
            continue;
        }
        match align(&seg.template, &seg.surface) {
            Some(a) => {
                if let Err(message) = f(&prefix, i, &a) {
                    out.push(Violation { word: form.text(), suffix: seg.label.clone(), message });
                }
            }
            None => out.push(Violation {
                word: form.text(),
                suffix: seg.label.clone(),
                message: format!("surface '{}' does not fit template '{}'", seg.surface, seg.template),
            }),
        }
        prefix.push_str(&seg.surface);
    }
    out
}

/// Every A/I suffix vowel agrees with the nearest preceding vowel in
/// backness (and rounding for I), except the first harmonizing vowel of
/// a stem with a harmony override.
pub fn check_harmony(form: &WordForm) -> Vec<Violation> {
    let mut override_pending = form.harmony_override.is_some();
    walk(form, |prefix, _, a| {
        let mut last = prefix.chars().rev().map(lower).find(|c| is_vowel(*c));
        for &(t, s) in &a.pairs {
            if matches!(t, 'A' | 'I') {
                let ok_shape = match t {
                    'A' => matches!(s, 'a' | 'e'),
                    _ => matches!(s, 'ı' | 'i' | 'u' | 'ü'),
                };
                if !ok_shape {
                    return Err(format!("{t} realized as {s}"));
                }
                if override_pending {
                    override_pending = false;
                    let want = form.harmony_override == Some(super::Frontness::Front);
                    if is_front(s) != want {
                        return Err(format!("override stem expects {} vowel, got {s}", if want { "front" } else { "back" }));
                    }
                    if t == 'I' && last.is_some_and(|p| is_rounded(p) != is_rounded(s)) {
                        return Err(format!("{s} disagrees in rounding"));
                    }
                } else if let Some(p) = last {
                    if is_front(p) != is_front(s) {
                        return Err(format!("{s} disagrees in backness with {p}"));
                    }
                    if t == 'I' && is_rounded(p) != is_rounded(s) {
                        return Err(format!("{s} disagrees in rounding with {p}"));
                    }
                }
            }
            if is_vowel(s) {
                last = Some(s);
                override_pending = false;
            }
        }
        Ok(())
    })
}

/// D surfaces as t exactly after a voiceless consonant.
pub fn check_voicing(form: &WordForm) -> Vec<Violation> {
    walk(form, |prefix, _, a| {
        let mut prev = prefix.chars().last();
        for &(t, s) in &a.pairs {
            if t == 'D' {
                let voiceless = prev.is_some_and(is_voiceless);
                match s {
                    'd' if voiceless => return Err("d after a voiceless consonant".into()),
                    't' if !voiceless => return Err("t after a voiced sound".into()),
                    'd' | 't' => {}
                    other => return Err(format!("D realized as {other}")),
                }
            }
            prev = Some(s);
        }
        Ok(())
    })
}

/// y/s/n buffers appear only after a vowel and an I buffer only after a
/// consonant; the n-initial case allomorphs appear only after a
/// third-person possessive or on a pronominal-n stem.
pub fn check_buffers(form: &WordForm) -> Vec<Violation> {
    walk(form, |prefix, i, a| {
        let after_vowel = prefix.chars().last().is_some_and(is_vowel);
        if let Some(b) = a.buffer {
            let should_keep = if b == 'I' { !after_vowel } else { after_vowel };
            if a.buffer_kept != should_keep {
                return Err(format!(
                    "buffer {b} {} after a {}",
                    if a.buffer_kept { "kept" } else { "dropped" },
                    if after_vowel { "vowel" } else { "consonant" }
                ));
            }
        }
        let seg = &form.suffixes[i];
        let n_case = matches!(seg.template.as_str(), "nI" | "nA" | "nDA" | "nDAn" | "nIn");
        if n_case {
            let prev = form.suffixes[..i].iter().rev().find(|s| !s.surface.is_empty());
            let licensed = match prev {
                Some(p) => p.label == "P3SG" || p.label == "P3PL",
                None => form.pronominal_n,
            };
            if !licensed {
                return Err(format!("{} without a third-person possessive", seg.template));
            }
        }
        Ok(())
    })
}

pub fn check_all(form: &WordForm) -> Vec<Violation> {
    let mut v = check_harmony(form);
    v.extend(check_voicing(form));
    v.extend(check_buffers(form));
    v
}
