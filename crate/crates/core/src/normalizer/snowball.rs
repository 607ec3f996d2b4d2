//! Snowball English (Porter2) stemmer.
//!
//! Follows the published Snowball `english` algorithm: exceptional forms,
//! `y` → `Y` marking, R1/R2 regions (with the gener/commun/arsen R1
//! overrides), then steps 0 through 5 applied to the end of the word.
//! Non-ASCII letters are treated as consonants.

const R1_PREFIXES: [&str; 3] = ["gener", "commun", "arsen"];

const EXCEPTION1: [(&str, &str); 18] = [
    ("skis", "ski"),
    ("skies", "sky"),
    ("dying", "die"),
    ("lying", "lie"),
    ("tying", "tie"),
    ("idly", "idl"),
    ("gently", "gentl"),
    ("ugly", "ugli"),
    ("early", "earli"),
    ("only", "onli"),
    ("singly", "singl"),
    ("sky", "sky"),
    ("news", "news"),
    ("howe", "howe"),
    ("atlas", "atlas"),
    ("cosmos", "cosmos"),
    ("bias", "bias"),
    ("andes", "andes"),
];

const EXCEPTION2: [&str; 8] = [
    "inning", "outing", "canning", "herring", "earring", "proceed", "exceed", "succeed",
];

const STEP2: [(&str, &str); 24] = [
    ("ization", "ize"),
    ("ational", "ate"),
    ("fulness", "ful"),
    ("ousness", "ous"),
    ("iveness", "ive"),
    ("tional", "tion"),
    ("biliti", "ble"),
    ("lessli", "less"),
    ("entli", "ent"),
    ("ation", "ate"),
    ("alism", "al"),
    ("aliti", "al"),
    ("ousli", "ous"),
    ("iviti", "ive"),
    ("fulli", "ful"),
    ("enci", "ence"),
    ("anci", "ance"),
    ("abli", "able"),
    ("izer", "ize"),
    ("ator", "ate"),
    ("alli", "al"),
    ("bli", "ble"),
    ("ogi", "og"),
    ("li", ""),
];

const STEP3: [(&str, &str); 9] = [
    ("ational", "ate"),
    ("tional", "tion"),
    ("alize", "al"),
    ("icate", "ic"),
    ("iciti", "ic"),
    ("ative", ""),
    ("ical", "ic"),
    ("ness", ""),
    ("ful", ""),
];

const STEP4: [&str; 18] = [
    "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent", "ism", "ate", "iti", "ous",
    "ive", "ize", "ion", "al", "er", "ic",
];

const DOUBLES: [&str; 9] = ["bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt"];

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

fn is_vowel_wxy(c: char) -> bool {
    is_vowel(c) || matches!(c, 'w' | 'x' | 'Y')
}

fn is_li_ending(c: char) -> bool {
    matches!(c, 'c' | 'd' | 'e' | 'g' | 'h' | 'k' | 'm' | 'n' | 'r' | 't')
}

/// Stems a single word. The input is lowercased first.
pub fn stem(word: &str) -> String {
    let lowered: String = word.chars().flat_map(char::to_lowercase).collect();
    if let Some((_, out)) = EXCEPTION1.iter().find(|(w, _)| *w == lowered) {
        return out.to_string();
    }
    let mut chars: Vec<char> = lowered.chars().collect();
    if chars.len() < 3 {
        return lowered;
    }

    if chars[0] == '\'' {
        chars.remove(0);
    }
    if chars.first() == Some(&'y') {
        chars[0] = 'Y';
    }
    for i in 1..chars.len() {
        if chars[i] == 'y' && is_vowel(chars[i - 1]) {
            chars[i] = 'Y';
        }
    }

    let mut w = Word::new(chars);
    w.step0();
    w.step1a();
    if !w.is_any_of(&EXCEPTION2) {
        w.step1b();
        w.step1c();
        w.step2();
        w.step3();
        w.step4();
        w.step5();
    }
    w.chars
        .into_iter()
        .map(|c| if c == 'Y' { 'y' } else { c })
        .collect()
}

struct Word {
    chars: Vec<char>,
    p1: usize,
    p2: usize,
}

/// Position just past the first vowel-then-consonant pair at or after `from`.
fn past_vowel_consonant(chars: &[char], from: usize) -> Option<usize> {
    let mut i = from;
    while i < chars.len() && !is_vowel(chars[i]) {
        i += 1;
    }
    if i == chars.len() {
        return None;
    }
    while i < chars.len() && is_vowel(chars[i]) {
        i += 1;
    }
    if i == chars.len() {
        return None;
    }
    Some(i + 1)
}

impl Word {
    fn new(chars: Vec<char>) -> Self {
        let n = chars.len();
        let prefix = R1_PREFIXES.iter().find_map(|p| {
            let pc: Vec<char> = p.chars().collect();
            chars.starts_with(&pc).then_some(pc.len())
        });
        let (p1, p2) = match prefix.or_else(|| past_vowel_consonant(&chars, 0)) {
            Some(p1) => (p1, past_vowel_consonant(&chars, p1).unwrap_or(n)),
            None => (n, n),
        };
        Self { chars, p1, p2 }
    }

    fn len(&self) -> usize {
        self.chars.len()
    }

    fn ends_with(&self, suffix: &str) -> bool {
        let n = suffix.chars().count();
        n <= self.len() && self.chars[self.len() - n..].iter().copied().eq(suffix.chars())
    }

    fn is_any_of(&self, words: &[&str]) -> bool {
        words.iter().any(|w| self.chars.iter().copied().eq(w.chars()))
    }

    /// Longest suffix from `candidates` that the word ends with.
    fn longest<'a>(&self, candidates: impl IntoIterator<Item = &'a str>) -> Option<&'a str> {
        candidates
            .into_iter()
            .filter(|s| self.ends_with(s))
            .max_by_key(|s| s.chars().count())
    }

    fn suffix_start(&self, suffix: &str) -> usize {
        self.len() - suffix.chars().count()
    }

    fn in_r1(&self, suffix: &str) -> bool {
        self.suffix_start(suffix) >= self.p1
    }

    fn in_r2(&self, suffix: &str) -> bool {
        self.suffix_start(suffix) >= self.p2
    }

    fn replace_suffix(&mut self, suffix: &str, with: &str) {
        let start = self.suffix_start(suffix);
        self.chars.truncate(start);
        self.chars.extend(with.chars());
    }

    fn char_before(&self, suffix: &str) -> Option<char> {
        self.suffix_start(suffix).checked_sub(1).map(|i| self.chars[i])
    }

    /// Whether `chars[..end]` ends in a short syllable.
    fn short_syllable_at(&self, end: usize) -> bool {
        let c = &self.chars[..end];
        match end {
            0 | 1 => false,
            2 => is_vowel(c[0]) && !is_vowel(c[1]),
            _ => !is_vowel(c[end - 3]) && is_vowel(c[end - 2]) && !is_vowel_wxy(c[end - 1]),
        }
    }

    fn step0(&mut self) {
        if let Some(s) = self.longest(["'s'", "'s", "'"]) {
            self.replace_suffix(s, "");
        }
    }

    fn step1a(&mut self) {
        match self.longest(["sses", "ied", "ies", "s", "us", "ss"]) {
            Some("sses") => self.replace_suffix("sses", "ss"),
            Some(s @ ("ied" | "ies")) => {
                let with = if self.suffix_start(s) > 1 { "i" } else { "ie" };
                self.replace_suffix(s, with);
            }
            Some("s") => {
                // Skip the letter right before the s, then look for a vowel.
                let before = self.len() - 1;
                if before >= 1 && self.chars[..before - 1].iter().any(|&c| is_vowel(c)) {
                    self.chars.pop();
                }
            }
            _ => {}
        }
    }

    fn step1b(&mut self) {
        match self.longest(["eed", "eedly", "ed", "edly", "ing", "ingly"]) {
            Some(s @ ("eed" | "eedly")) => {
                if self.in_r1(s) {
                    self.replace_suffix(s, "ee");
                }
            }
            Some(s) => {
                let start = self.suffix_start(s);
                if !self.chars[..start].iter().any(|&c| is_vowel(c)) {
                    return;
                }
                self.chars.truncate(start);
                if self.longest(["at", "bl", "iz"]).is_some() {
                    self.chars.push('e');
                } else if self.longest(DOUBLES).is_some() {
                    self.chars.pop();
                } else if self.p1 == self.len() && self.short_syllable_at(self.len()) {
                    self.chars.push('e');
                }
            }
            None => {}
        }
    }

    fn step1c(&mut self) {
        let n = self.len();
        if n >= 3 && matches!(self.chars[n - 1], 'y' | 'Y') && !is_vowel(self.chars[n - 2]) {
            self.chars[n - 1] = 'i';
        }
    }

    fn step2(&mut self) {
        let Some(s) = self.longest(STEP2.iter().map(|(s, _)| *s)) else {
            return;
        };
        if !self.in_r1(s) {
            return;
        }
        let with = STEP2.iter().find(|(k, _)| *k == s).map(|(_, v)| *v).unwrap_or("");
        let ok = match s {
            "ogi" => self.char_before(s) == Some('l'),
            "li" => self.char_before(s).is_some_and(is_li_ending),
            _ => true,
        };
        if ok {
            self.replace_suffix(s, with);
        }
    }

    fn step3(&mut self) {
        let Some(s) = self.longest(STEP3.iter().map(|(s, _)| *s)) else {
            return;
        };
        if !self.in_r1(s) || (s == "ative" && !self.in_r2(s)) {
            return;
        }
        let with = STEP3.iter().find(|(k, _)| *k == s).map(|(_, v)| *v).unwrap_or("");
        self.replace_suffix(s, with);
    }

    fn step4(&mut self) {
        let Some(s) = self.longest(STEP4) else {
            return;
        };
        if !self.in_r2(s) {
            return;
        }
        if s == "ion" && !matches!(self.char_before(s), Some('s' | 't')) {
            return;
        }
        self.replace_suffix(s, "");
    }

    fn step5(&mut self) {
        if self.ends_with("e") {
            let before = self.len() - 1;
            if self.in_r2("e") || (self.in_r1("e") && !self.short_syllable_at(before)) {
                self.chars.pop();
            }
        } else if self.ends_with("l") && self.in_r2("l") && self.char_before("l") == Some('l') {
            self.chars.pop();
        }
    }
}
