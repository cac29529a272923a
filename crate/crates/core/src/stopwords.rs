//! Small bundled function-word lists, used when ranking frequent terms.

use std::collections::HashSet;

const EN: &[&str] = &[
    "a", "about", "all", "am", "an", "and", "are", "as", "at", "be", "been", "but", "by", "can",
    "do", "does", "for", "from", "had", "has", "have", "he", "her", "him", "his", "i", "if", "in",
    "is", "it", "its", "just", "me", "my", "no", "not", "of", "on", "or", "our", "rt", "she", "so",
    "that", "the", "their", "them", "they", "this", "to", "too", "up", "us", "was", "we", "were",
    "what", "when", "who", "will", "with", "would", "you", "your",
];

const ES: &[&str] = &[
    "a", "al", "algo", "como", "con", "de", "del", "el", "ella", "ellos", "en", "es", "esa", "ese",
    "esta", "este", "estos", "ha", "hay", "la", "las", "le", "les", "lo", "los", "me", "mi", "muy",
    "ni", "no", "nos", "o", "para", "pero", "por", "que", "qué", "rt", "se", "si", "sí", "sin",
    "su", "sus", "te", "tu", "un", "una", "uno", "y", "ya", "yo",
];

const IT: &[&str] = &[
    "a", "ad", "al", "alla", "anche", "che", "chi", "ci", "come", "con", "da", "dal", "dei", "del",
    "della", "di", "e", "è", "gli", "ha", "i", "il", "in", "io", "la", "le", "lo", "ma", "mi",
    "ne", "nel", "non", "o", "per", "più", "rt", "se", "si", "sono", "su", "sua", "suo", "ti",
    "tra", "tu", "un", "una", "uno",
];

/// Stopwords for an ISO-639-1 code; unknown languages get an empty set.
pub fn for_language(language: &str) -> HashSet<&'static str> {
    let list: &[&str] = match language {
        "en" => EN,
        "es" => ES,
        "it" => IT,
        _ => &[],
    };
    list.iter().copied().collect()
}

/// Copies `docs` without the given stopwords; documents may become empty.
pub fn remove<S: AsRef<str>>(docs: &[&[S]], stopwords: &HashSet<&str>) -> Vec<Vec<String>> {
    docs.iter()
        .map(|d| {
            d.iter()
                .map(AsRef::as_ref)
                .filter(|t| !stopwords.contains(t))
                .map(str::to_string)
                .collect()
        })
        .collect()
}
