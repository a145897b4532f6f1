/// One concordance hit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KwicLine {
    pub unit: usize,
    /// Token offset of the keyword within the unit.
    pub offset: usize,
    pub left: String,
    pub keyword: String,
    pub right: String,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '’')
}

/// Splits on whitespace and punctuation, keeping hyphens and apostrophes
/// that sit between word characters.
pub fn tokenize(text: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &(pos, c)) in chars.iter().enumerate() {
        let keep = is_word_char(c)
            || (is_joiner(c) && start.is_some() && chars.get(i + 1).is_some_and(|&(_, n)| is_word_char(n)));
        match (keep, start) {
            (true, None) => start = Some(pos),
            (false, Some(s)) => {
                out.push(&text[s..pos]);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(&text[s..]);
    }
    out
}

/// Case-insensitive concordance of `pattern` (one or more tokens) with up
/// to `window` tokens of context on each side, ordered by unit then offset.
pub fn kwic(units: &[&str], pattern: &str, window: usize) -> Vec<KwicLine> {
    let needle: Vec<String> = tokenize(pattern).iter().map(|t| t.to_lowercase()).collect();
    if needle.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (u, text) in units.iter().enumerate() {
        let tokens = tokenize(text);
        let lower: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
        if lower.len() < needle.len() {
            continue;
        }
        for i in 0..=lower.len() - needle.len() {
            if lower[i..i + needle.len()] != needle[..] {
                continue;
            }
            let end = i + needle.len();
            out.push(KwicLine {
                unit: u,
                offset: i,
                left: tokens[i.saturating_sub(window)..i].join(" "),
                keyword: tokens[i..end].join(" "),
                right: tokens[end..(end + window).min(tokens.len())].join(" "),
            });
        }
    }
    out
}

/// Aligned listing: left context right-aligned, keyword column padded.
pub fn render_kwic(lines: &[KwicLine]) -> String {
    let lw = lines.iter().map(|l| l.left.chars().count()).max().unwrap_or(0);
    let kw = lines.iter().map(|l| l.keyword.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for l in lines {
        let row = format!("{:>lw$}  {:<kw$}  {}", l.left, l.keyword, l.right);
        out.push_str(row.trim_end());
        out.push('\n');
    }
    out
}
