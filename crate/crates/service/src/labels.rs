//! Interface strings for the supported view languages.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    It,
    Fr,
    De,
    #[default]
    En,
}

impl Lang {
    pub const ALL: [Lang; 4] = [Lang::It, Lang::Fr, Lang::De, Lang::En];

    pub fn code(self) -> &'static str {
        match self {
            Lang::It => "it",
            Lang::Fr => "fr",
            Lang::De => "de",
            Lang::En => "en",
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Lang {
    type Err = String;

    fn from_str(s: &str) -> Result<Lang, String> {
        Lang::ALL
            .into_iter()
            .find(|l| l.code() == s)
            .ok_or_else(|| format!("unsupported language `{s}` (expected it, fr, de or en)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    pub reference: String,
    pub colouring: String,
    pub score: String,
    pub progress: String,
    pub confirm: String,
    pub retry: String,
    pub surrender: String,
    pub feedback: String,
    pub dashboard: String,
    pub survey: String,
    pub correct: String,
    pub incorrect: String,
    pub skipped: String,
}

type Table = [&'static str; 13];

const IT: Table = [
    "Schema di riferimento",
    "Schema da colorare",
    "Punteggio",
    "Avanzamento",
    "Conferma",
    "Riprova",
    "Arrenditi",
    "Feedback visivo",
    "Risultati",
    "Questionario",
    "corretto",
    "sbagliato",
    "saltato",
];

const FR: Table = [
    "Schéma de référence",
    "Schéma à colorier",
    "Score",
    "Progression",
    "Confirmer",
    "Réessayer",
    "Abandonner",
    "Retour visuel",
    "Résultats",
    "Questionnaire",
    "correct",
    "incorrect",
    "passé",
];

const DE: Table = [
    "Referenzschema",
    "Malschema",
    "Punktzahl",
    "Fortschritt",
    "Bestätigen",
    "Nochmal",
    "Aufgeben",
    "Visuelles Feedback",
    "Ergebnisse",
    "Umfrage",
    "richtig",
    "falsch",
    "übersprungen",
];

const EN: Table = [
    "Reference schema",
    "Colouring schema",
    "Score",
    "Progress",
    "Confirm",
    "Retry",
    "Give up",
    "Visual feedback",
    "Results",
    "Survey",
    "correct",
    "incorrect",
    "skipped",
];

pub fn labels(lang: Lang) -> Labels {
    let t = match lang {
        Lang::It => &IT,
        Lang::Fr => &FR,
        Lang::De => &DE,
        Lang::En => &EN,
    };
    Labels {
        reference: t[0].into(),
        colouring: t[1].into(),
        score: t[2].into(),
        progress: t[3].into(),
        confirm: t[4].into(),
        retry: t[5].into(),
        surrender: t[6].into(),
        feedback: t[7].into(),
        dashboard: t[8].into(),
        survey: t[9].into(),
        correct: t[10].into(),
        incorrect: t[11].into(),
        skipped: t[12].into(),
    }
}
