//! ASJC subject classes: one general class plus 26 specific ones.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

macro_rules! subjects {
    ($($variant:ident => $name:literal,)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum Subject {
            $($variant,)*
        }

        impl Subject {
            pub const ALL: &'static [Subject] = &[$(Subject::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Subject::$variant => $name,)*
                }
            }
        }
    };
}

subjects! {
    Multidisciplinary => "Multidisciplinary",
    AgriculturalAndBiologicalSciences => "Agricultural and Biological Sciences",
    ArtsAndHumanities => "Arts and Humanities",
    BiochemistryGeneticsAndMolecularBiology => "Biochemistry Genetics and Molecular Biology",
    BusinessManagementAndAccounting => "Business Management and Accounting",
    ChemicalEngineering => "Chemical Engineering",
    Chemistry => "Chemistry",
    ComputerScience => "Computer Science",
    DecisionSciences => "Decision Sciences",
    Dentistry => "Dentistry",
    EarthAndPlanetarySciences => "Earth and Planetary Sciences",
    EconomicsEconometricsAndFinance => "Economics Econometrics and Finance",
    Energy => "Energy",
    Engineering => "Engineering",
    EnvironmentalScience => "Environmental Science",
    HealthProfessions => "Health Professions",
    ImmunologyAndMicrobiology => "Immunology and Microbiology",
    MaterialsScience => "Materials Science",
    Mathematics => "Mathematics",
    Medicine => "Medicine",
    Neuroscience => "Neuroscience",
    Nursing => "Nursing",
    PharmacologyToxicologyAndPharmaceutics => "Pharmacology Toxicology and Pharmaceuticals",
    PhysicsAndAstronomy => "Physics and Astronomy",
    Psychology => "Psychology",
    SocialSciences => "Social Sciences",
    Veterinary => "Veterinary",
}

/// Lower-case, treat `&` as "and", drop punctuation, collapse whitespace.
fn fold(s: &str) -> String {
    let s = s.replace('&', " and ");
    let cleaned: String = s
        .chars()
        .map(|c| if c.is_alphanumeric() { c.to_ascii_lowercase() } else { ' ' })
        .collect();
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown subject `{0}`")]
pub struct UnknownSubject(pub String);

impl FromStr for Subject {
    type Err = UnknownSubject;

    /// Accepts the canonical names as well as spellings that differ only in
    /// case, commas or `&` (e.g. "Biochemistry, Genetics & Molecular Biology").
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = fold(s);
        if key == "general" {
            return Ok(Subject::Multidisciplinary);
        }
        Subject::ALL
            .iter()
            .copied()
            .find(|subj| fold(subj.name()) == key)
            .ok_or_else(|| UnknownSubject(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_seven_classes() {
        assert_eq!(Subject::ALL.len(), 27);
    }

    #[test]
    fn lenient_parsing() {
        assert_eq!(
            "Biochemistry, Genetics and Molecular Biology".parse::<Subject>().unwrap(),
            Subject::BiochemistryGeneticsAndMolecularBiology
        );
        assert_eq!("medicine".parse::<Subject>().unwrap(), Subject::Medicine);
        assert_eq!(
            "Economics, Econometrics & Finance".parse::<Subject>().unwrap(),
            Subject::EconomicsEconometricsAndFinance
        );
        assert!("Astrology".parse::<Subject>().is_err());
    }

    #[test]
    fn names_round_trip() {
        for s in Subject::ALL {
            assert_eq!(s.name().parse::<Subject>().unwrap(), *s);
        }
    }
}
