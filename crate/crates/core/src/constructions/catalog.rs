//! The implemented rows of the capacity-achieving ensemble table.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::powerseries::{Construction, DegreePair, Family};

use super::lambert::solve_b;
use super::regular::{self, Region};
use super::self_matched::{self, f_deriv_at_one};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CatalogEntry {
    AraSelfMatched,
    NsiraSelfMatched,
    AldpcSelfMatched,
    AraBitRegular,
    AraCheckRegular,
    NsiraBitRegular,
    NsiraCheckRegular,
    AldpcBitRegular,
    AldpcCheckRegular,
}

pub const CATALOG: [CatalogEntry; 9] = [
    CatalogEntry::AraSelfMatched,
    CatalogEntry::NsiraSelfMatched,
    CatalogEntry::AldpcSelfMatched,
    CatalogEntry::AraBitRegular,
    CatalogEntry::AraCheckRegular,
    CatalogEntry::NsiraBitRegular,
    CatalogEntry::NsiraCheckRegular,
    CatalogEntry::AldpcBitRegular,
    CatalogEntry::AldpcCheckRegular,
];

impl CatalogEntry {
    pub fn name(self) -> &'static str {
        match self {
            CatalogEntry::AraSelfMatched => "ara-sm",
            CatalogEntry::NsiraSelfMatched => "nsira-sm",
            CatalogEntry::AldpcSelfMatched => "aldpc-sm",
            CatalogEntry::AraBitRegular => "ara-br3",
            CatalogEntry::AraCheckRegular => "ara-cr3",
            CatalogEntry::NsiraBitRegular => "nsira-br3",
            CatalogEntry::NsiraCheckRegular => "nsira-cr3",
            CatalogEntry::AldpcBitRegular => "aldpc-br3",
            CatalogEntry::AldpcCheckRegular => "aldpc-cr3",
        }
    }

    pub fn family(self) -> Family {
        match self {
            CatalogEntry::AraSelfMatched
            | CatalogEntry::AraBitRegular
            | CatalogEntry::AraCheckRegular => Family::Ara,
            CatalogEntry::NsiraSelfMatched
            | CatalogEntry::NsiraBitRegular
            | CatalogEntry::NsiraCheckRegular => Family::Nsira,
            _ => Family::Aldpc,
        }
    }

    pub fn is_self_matched(self) -> bool {
        matches!(
            self,
            CatalogEntry::AraSelfMatched
                | CatalogEntry::NsiraSelfMatched
                | CatalogEntry::AldpcSelfMatched
        )
    }

    /// The row built by `construction` for `family`, if any.
    pub fn from_parts(family: Family, construction: Construction) -> Option<CatalogEntry> {
        use Construction::*;
        Some(match (family, construction) {
            (Family::Ara, SelfMatched) => CatalogEntry::AraSelfMatched,
            (Family::Nsira, SelfMatched) => CatalogEntry::NsiraSelfMatched,
            (Family::Aldpc, SelfMatched) => CatalogEntry::AldpcSelfMatched,
            (Family::Ara, BitRegular) => CatalogEntry::AraBitRegular,
            (Family::Ara, CheckRegular) => CatalogEntry::AraCheckRegular,
            (Family::Nsira, BitRegular) => CatalogEntry::NsiraBitRegular,
            (Family::Nsira, CheckRegular) => CatalogEntry::NsiraCheckRegular,
            (Family::Aldpc, BitRegular) => CatalogEntry::AldpcBitRegular,
            (Family::Aldpc, CheckRegular) => CatalogEntry::AldpcCheckRegular,
            _ => return None,
        })
    }

    /// A design point inside the row's proven range.
    pub fn representative_p(self) -> f64 {
        match self {
            CatalogEntry::AraSelfMatched
            | CatalogEntry::NsiraSelfMatched
            | CatalogEntry::AldpcSelfMatched => 0.5,
            CatalogEntry::AraBitRegular => 0.2,
            CatalogEntry::AraCheckRegular => 0.8,
            CatalogEntry::NsiraBitRegular => 0.05,
            CatalogEntry::NsiraCheckRegular => 0.5,
            CatalogEntry::AldpcBitRegular => 0.5,
            CatalogEntry::AldpcCheckRegular => 0.95,
        }
    }

    /// The mirror row under the bit/check swap.
    pub fn swapped(self) -> CatalogEntry {
        match self {
            CatalogEntry::AraSelfMatched => CatalogEntry::AraSelfMatched,
            CatalogEntry::NsiraSelfMatched => CatalogEntry::AldpcSelfMatched,
            CatalogEntry::AldpcSelfMatched => CatalogEntry::NsiraSelfMatched,
            CatalogEntry::AraBitRegular => CatalogEntry::AraCheckRegular,
            CatalogEntry::AraCheckRegular => CatalogEntry::AraBitRegular,
            CatalogEntry::NsiraBitRegular => CatalogEntry::AldpcCheckRegular,
            CatalogEntry::AldpcCheckRegular => CatalogEntry::NsiraBitRegular,
            CatalogEntry::NsiraCheckRegular => CatalogEntry::AldpcBitRegular,
            CatalogEntry::AldpcBitRegular => CatalogEntry::NsiraCheckRegular,
        }
    }

    /// Builds the row at `p`. Self-matched rows use `b` or, if absent,
    /// the smallest admissible value from [`solve_b`].
    pub fn build(self, p: f64, b: Option<f64>, order: usize, region: Region) -> Result<DegreePair> {
        let b = || b.map_or_else(|| solve_b(p), Ok);
        match self {
            CatalogEntry::AraSelfMatched => self_matched::self_matched_ara(p, b()?, order),
            CatalogEntry::NsiraSelfMatched => self_matched::self_matched_nsira(p, b()?, order),
            CatalogEntry::AldpcSelfMatched => self_matched::self_matched_aldpc(p, b()?, order),
            CatalogEntry::AraBitRegular => regular::bit_regular_ara_in(p, order, region),
            CatalogEntry::AraCheckRegular => regular::check_regular_ara_in(p, order, region),
            CatalogEntry::NsiraBitRegular => regular::nsira_bit_regular_in(p, order, region),
            CatalogEntry::NsiraCheckRegular => regular::nsira_check_regular(p, order),
            CatalogEntry::AldpcBitRegular => regular::aldpc_bit_regular(p, order),
            CatalogEntry::AldpcCheckRegular => regular::aldpc_check_regular_in(p, order, region),
        }
    }

    /// Complexity per information bit in closed form, `(χ_E, χ_D)`.
    pub fn complexity_closed_form(self, p: f64, b: Option<f64>) -> (Option<f64>, f64) {
        let both = |c: f64| (Some(c), c);
        let q = 1.0 - p;
        let f1 = || b.map(f_deriv_at_one).unwrap_or(f64::NAN);
        match self {
            CatalogEntry::AraSelfMatched => both(3.0 + p * f1() + 2.0 * p / q),
            CatalogEntry::NsiraSelfMatched => both(2.0 / q + f1()),
            CatalogEntry::AldpcSelfMatched => (None, (3.0 + p * f1()) / q),
            CatalogEntry::AraBitRegular => both(6.0 + 2.0 * p / q),
            CatalogEntry::AraCheckRegular => both(3.0 + 5.0 * p / q),
            CatalogEntry::NsiraBitRegular => both(3.0 + 2.0 / q),
            CatalogEntry::NsiraCheckRegular => both(5.0 / q),
            CatalogEntry::AldpcBitRegular => (None, 6.0 / q),
            CatalogEntry::AldpcCheckRegular => (None, 3.0 * (1.0 + p) / q),
        }
    }
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl serde::Serialize for CatalogEntry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for CatalogEntry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        CATALOG
            .iter()
            .copied()
            .find(|e| e.name() == lower)
            .ok_or_else(|| {
                let names: Vec<_> = CATALOG.iter().map(|e| e.name()).collect();
                Error::InvalidInput(format!(
                    "unknown family {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}
