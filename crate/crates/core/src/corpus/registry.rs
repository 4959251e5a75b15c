//! Language and programming-language registry.
//!
//! Natural languages are the 116 CC-100 languages (ISO-639-1 style codes,
//! Romanized variants as separate entries). Names are the ones used in
//! translation prompts.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Label used for code-paired text whose language is not trusted.
pub const TEXT_LABEL: &str = "text";
/// Language code for records whose language is not known.
pub const UNKNOWN_LANG: &str = "unknown";

/// `(code, prompt name)`, sorted by code.
pub const NATURAL_LANGUAGES: &[(&str, &str)] = &[
    ("af", "Afrikaans"),
    ("am", "Amharic"),
    ("ar", "Arabic"),
    ("as", "Assamese"),
    ("az", "Azerbaijani"),
    ("be", "Belarusian"),
    ("bg", "Bulgarian"),
    ("bn", "Bengali"),
    ("bn_rom", "Bengali Romanized"),
    ("br", "Breton"),
    ("bs", "Bosnian"),
    ("ca", "Catalan"),
    ("cs", "Czech"),
    ("cy", "Welsh"),
    ("da", "Danish"),
    ("de", "German"),
    ("el", "Greek"),
    ("en", "English"),
    ("eo", "Esperanto"),
    ("es", "Spanish"),
    ("et", "Estonian"),
    ("eu", "Basque"),
    ("fa", "Persian"),
    ("ff", "Fulah"),
    ("fi", "Finnish"),
    ("fr", "French"),
    ("fy", "Western Frisian"),
    ("ga", "Irish"),
    ("gd", "Scottish Gaelic"),
    ("gl", "Galician"),
    ("gn", "Guarani"),
    ("gu", "Gujarati"),
    ("ha", "Hausa"),
    ("he", "Hebrew"),
    ("hi", "Hindi"),
    ("hi_rom", "Hindi Romanized"),
    ("hr", "Croatian"),
    ("ht", "Haitian"),
    ("hu", "Hungarian"),
    ("hy", "Armenian"),
    ("id", "Indonesian"),
    ("ig", "Igbo"),
    ("is", "Icelandic"),
    ("it", "Italian"),
    ("ja", "Japanese"),
    ("jv", "Javanese"),
    ("ka", "Georgian"),
    ("kk", "Kazakh"),
    ("km", "Central Khmer"),
    ("kn", "Kannada"),
    ("ko", "Korean"),
    ("ku", "Kurdish"),
    ("ky", "Kirghiz"),
    ("la", "Latin"),
    ("lg", "Ganda"),
    ("li", "Limburgan"),
    ("ln", "Lingala"),
    ("lo", "Lao"),
    ("lt", "Lithuanian"),
    ("lv", "Latvian"),
    ("mg", "Malagasy"),
    ("mk", "Macedonian"),
    ("ml", "Malayalam"),
    ("mn", "Mongolian"),
    ("mr", "Marathi"),
    ("ms", "Malay"),
    ("my", "Burmese"),
    ("my_zaw", "Burmese (Zawgyi)"),
    ("ne", "Nepali"),
    ("nl", "Dutch"),
    ("no", "Norwegian"),
    ("ns", "Northern Sotho"),
    ("om", "Oromo"),
    ("or", "Oriya"),
    ("pa", "Panjabi"),
    ("pl", "Polish"),
    ("ps", "Pushto"),
    ("pt", "Portuguese"),
    ("qu", "Quechua"),
    ("rm", "Romansh"),
    ("ro", "Romanian"),
    ("ru", "Russian"),
    ("sa", "Sanskrit"),
    ("sc", "Sardinian"),
    ("sd", "Sindhi"),
    ("si", "Sinhala"),
    ("sk", "Slovak"),
    ("sl", "Slovenian"),
    ("so", "Somali"),
    ("sq", "Albanian"),
    ("sr", "Serbian"),
    ("ss", "Swati"),
    ("su", "Sundanese"),
    ("sv", "Swedish"),
    ("sw", "Swahili"),
    ("ta", "Tamil"),
    ("ta_rom", "Tamil Romanized"),
    ("te", "Telugu"),
    ("te_rom", "Telugu Romanized"),
    ("th", "Thai"),
    ("tl", "Tagalog"),
    ("tn", "Tswana"),
    ("tr", "Turkish"),
    ("ug", "Uighur"),
    ("uk", "Ukrainian"),
    ("ur", "Urdu"),
    ("ur_rom", "Urdu Romanized"),
    ("uz", "Uzbek"),
    ("vi", "Vietnamese"),
    ("wo", "Wolof"),
    ("xh", "Xhosa"),
    ("yi", "Yiddish"),
    ("yo", "Yoruba"),
    ("zh", "Chinese"),
    ("zh-Hant", "Chinese (Traditional)"),
    ("zu", "Zulu"),
];

/// Languages covered by the bundled parallel-text corpora and language-id profiles.
pub const PARALLEL_LANGUAGES: &[&str] = &[
    "ar", "bg", "de", "el", "en", "es", "fr", "hi", "ru", "sw", "th", "tr", "ur", "vi", "zh",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProgrammingLanguage {
    Go,
    Java,
    JavaScript,
    #[serde(rename = "PHP")]
    Php,
    Python,
    Ruby,
}

impl ProgrammingLanguage {
    pub const ALL: [ProgrammingLanguage; 6] = [
        Self::Go,
        Self::Java,
        Self::JavaScript,
        Self::Php,
        Self::Python,
        Self::Ruby,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Go => "Go",
            Self::Java => "Java",
            Self::JavaScript => "JavaScript",
            Self::Php => "PHP",
            Self::Python => "Python",
            Self::Ruby => "Ruby",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|pl| pl.name() == name)
    }
}

impl fmt::Display for ProgrammingLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn is_language_code(code: &str) -> bool {
    NATURAL_LANGUAGES.binary_search_by(|(c, _)| c.cmp(&code)).is_ok()
}

pub fn language_name(code: &str) -> Option<&'static str> {
    NATURAL_LANGUAGES
        .binary_search_by(|(c, _)| c.cmp(&code))
        .ok()
        .map(|i| NATURAL_LANGUAGES[i].1)
}

/// Resolves a prompt label: a language code, a language name, a PL name or
/// the generic `"text"` label. Returns the name used inside prompts.
pub fn prompt_name(label: &str) -> Option<&'static str> {
    if label == TEXT_LABEL {
        return Some(TEXT_LABEL);
    }
    if let Some(pl) = ProgrammingLanguage::from_name(label) {
        return Some(pl.name());
    }
    if let Some(name) = language_name(label) {
        return Some(name);
    }
    NATURAL_LANGUAGES
        .iter()
        .find(|(_, name)| *name == label)
        .map(|(_, name)| *name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_sorted_and_complete() {
        assert_eq!(NATURAL_LANGUAGES.len(), 116);
        assert!(NATURAL_LANGUAGES.windows(2).all(|w| w[0].0 < w[1].0));
        for code in PARALLEL_LANGUAGES {
            assert!(is_language_code(code), "{code}");
        }
    }

    #[test]
    fn prompt_names() {
        assert_eq!(prompt_name("es"), Some("Spanish"));
        assert_eq!(prompt_name("Spanish"), Some("Spanish"));
        assert_eq!(prompt_name("Python"), Some("Python"));
        assert_eq!(prompt_name("zh"), Some("Chinese"));
        assert_eq!(prompt_name("text"), Some("text"));
        assert_eq!(prompt_name("Klingon"), None);
    }
}
