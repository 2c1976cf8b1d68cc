//! Problem data model, text file format, validation, and instance generation.
//!
//! # File format
//!
//! Instances are stored in a TSPLIB-flavored plain text format. A header
//! block of `KEY: value` lines (in any order) is followed by a coordinate
//! section and an item section:
//!
//! ```text
//! PROBLEM NAME: sample3
//! DIMENSION: 3
//! NUMBER OF ITEMS: 2
//! CAPACITY OF KNAPSACK: 5
//! MIN SPEED: 0.1
//! MAX SPEED: 1.0
//! RENTING RATIO: 1.0
//! EDGE_WEIGHT_TYPE: EUC_2D
//! NODE_COORD_SECTION (INDEX, X, Y):
//! 1 0 0
//! 2 3 0
//! 3 3 4
//! ITEMS SECTION (INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):
//! 1 100 3 2
//! 2 40 2 3
//! ```
//!
//! `EDGE_WEIGHT_TYPE` is `EUC_2D` (exact Euclidean distance) or `CEIL_2D`
//! (Euclidean rounded up). Unknown header keys are ignored so that files with
//! extra annotations still load. [`serialize_instance`] prints numbers with
//! shortest round-trip precision, so `parse(serialize(inst))` reproduces the
//! instance exactly.
//!
//! City and item indices are 1-based throughout, matching the file format.
//! City 1 is the depot; items can never be assigned to it.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// A city with its 1-based index and plane coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct City {
    pub index: usize,
    pub x: f64,
    pub y: f64,
}

/// An item with its 1-based index, profit, weight, and home city.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Item {
    pub index: usize,
    pub profit: f64,
    pub weight: f64,
    /// 1-based index of the city where the item is located. Never the depot.
    pub city: usize,
}

/// Linear speed model: `v(w) = v_max - w * (v_max - v_min) / capacity`.
///
/// The thief moves at `v_max` when empty and at `v_min` when the knapsack is
/// full. `(v_max - v_min) / capacity` is the slope that couples the packing
/// decision to travel time; when it is zero the two sub-problems decompose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedModel {
    pub v_max: f64,
    pub v_min: f64,
    pub capacity: f64,
}

impl SpeedModel {
    /// Speed loss per unit of carried weight.
    #[must_use]
    pub fn slope(&self) -> f64 {
        (self.v_max - self.v_min) / self.capacity
    }
}

/// Distance rounding mode, from `EDGE_WEIGHT_TYPE`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    /// `EUC_2D`: exact Euclidean distance.
    None,
    /// `CEIL_2D`: Euclidean distance rounded up to the next integer.
    Ceil,
}

/// A complete problem instance. Construct it by parsing or generation and
/// treat it as immutable afterwards; the `with_*` helpers return modified
/// copies for parameter studies.
#[derive(Debug, Clone, PartialEq)]
pub struct TtpInstance {
    pub name: String,
    pub cities: Vec<City>,
    pub items: Vec<Item>,
    pub speed: SpeedModel,
    /// Rent rate `r` in the objective `B = P - r * T`.
    pub rent: f64,
    pub rounding: Rounding,
}

impl TtpInstance {
    #[must_use]
    pub fn num_cities(&self) -> usize {
        self.cities.len()
    }

    #[must_use]
    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    /// Distance between cities `j` and `k` (1-based indices).
    ///
    /// Symmetric, zero on the diagonal, and rounded up under
    /// [`Rounding::Ceil`].
    pub fn distance(&self, j: usize, k: usize) -> Result<f64, InstanceError> {
        let n = self.cities.len();
        for index in [j, k] {
            if index == 0 || index > n {
                return Err(InstanceError::IndexOutOfRange { index, n });
            }
        }
        Ok(self.distance_unchecked(j, k))
    }

    #[inline]
    pub(crate) fn distance_unchecked(&self, j: usize, k: usize) -> f64 {
        let a = &self.cities[j - 1];
        let b = &self.cities[k - 1];
        let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
        match self.rounding {
            Rounding::None => d,
            Rounding::Ceil => d.ceil(),
        }
    }

    /// Sum of all item weights, whether or not they fit the knapsack.
    #[must_use]
    pub fn total_item_weight(&self) -> f64 {
        self.items.iter().map(|it| it.weight).sum()
    }

    /// Copy of the instance with a different rent rate.
    #[must_use]
    pub fn with_rent(&self, rent: f64) -> TtpInstance {
        TtpInstance { rent, ..self.clone() }
    }

    /// Copy of the instance with a different minimum speed.
    #[must_use]
    pub fn with_min_speed(&self, v_min: f64) -> TtpInstance {
        let mut inst = self.clone();
        inst.speed.v_min = v_min;
        inst
    }

    /// Copy of the instance with a different knapsack capacity.
    #[must_use]
    pub fn with_capacity(&self, capacity: f64) -> TtpInstance {
        let mut inst = self.clone();
        inst.speed.capacity = capacity;
        inst
    }
}

/// Errors from parsing, indexing, or constructing instances.
#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("city index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid instance: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("invalid generator config: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),
}

fn parse_err(line: usize, message: impl Into<String>) -> InstanceError {
    InstanceError::Parse { line, message: message.into() }
}

/// Checks every structural invariant and returns one message per violation.
/// An empty list means the instance is well-formed.
#[must_use]
pub fn validate_instance(inst: &TtpInstance) -> Vec<String> {
    let mut violations = Vec::new();
    let n = inst.cities.len();
    if n < 2 {
        violations.push("cities: fewer than 2 cities".to_string());
    }
    for (pos, city) in inst.cities.iter().enumerate() {
        if city.index != pos + 1 {
            violations.push(format!("city {}: index {} out of order", pos + 1, city.index));
        }
        if !city.x.is_finite() || !city.y.is_finite() {
            violations.push(format!("city {}: non-finite coordinates", city.index));
        }
    }
    for (pos, item) in inst.items.iter().enumerate() {
        if item.index != pos + 1 {
            violations.push(format!("item {}: index {} out of order", pos + 1, item.index));
        }
        if !item.profit.is_finite() || item.profit < 0.0 {
            violations.push(format!("item {}: profit must be a non-negative real", item.index));
        }
        if !item.weight.is_finite() || item.weight <= 0.0 {
            violations.push(format!("item {}: weight must be a positive real", item.index));
        }
        if item.city == 1 {
            violations.push(format!("item {}: assigned to depot", item.index));
        } else if item.city == 0 || item.city > n {
            violations.push(format!(
                "item {}: assigned node {} out of range",
                item.index, item.city
            ));
        }
    }
    let speed = inst.speed;
    if !speed.v_min.is_finite() || speed.v_min <= 0.0 {
        violations.push("speed: v_min must be positive".to_string());
    }
    if !speed.v_max.is_finite() || speed.v_max <= 0.0 {
        violations.push("speed: v_max must be positive".to_string());
    }
    if speed.v_min.is_finite() && speed.v_max.is_finite() && speed.v_min > speed.v_max {
        violations.push("speed: v_min exceeds v_max".to_string());
    }
    if !speed.capacity.is_finite() || speed.capacity <= 0.0 {
        violations.push("speed: capacity must be positive".to_string());
    }
    if !inst.rent.is_finite() || inst.rent < 0.0 {
        violations.push("rent: must be a non-negative real".to_string());
    }
    violations
}

fn parse_field<T: FromStr>(value: &str, line: usize, what: &str) -> Result<T, InstanceError> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| parse_err(line, format!("invalid {what} value `{}`", value.trim())))
}

/// Parses the text format described in the module docs.
///
/// The result is field-by-field faithful to the file; call
/// [`validate_instance`] afterwards to check semantic invariants. Errors name
/// the offending line.
pub fn parse_instance(text: &str) -> Result<TtpInstance, InstanceError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut pos = 0usize;

    let mut name: Option<String> = None;
    let mut dimension: Option<usize> = None;
    let mut num_items: Option<usize> = None;
    let mut capacity: Option<f64> = None;
    let mut v_min: Option<f64> = None;
    let mut v_max: Option<f64> = None;
    let mut rent: Option<f64> = None;
    let mut rounding: Option<Rounding> = None;

    loop {
        let Some(raw) = lines.get(pos) else {
            return Err(parse_err(lines.len().max(1), "missing NODE_COORD_SECTION"));
        };
        let line = raw.trim();
        let lineno = pos + 1;
        if line.is_empty() {
            pos += 1;
            continue;
        }
        if line.starts_with("NODE_COORD_SECTION") {
            break;
        }
        if line.starts_with("ITEMS SECTION") {
            return Err(parse_err(lineno, "ITEMS SECTION before NODE_COORD_SECTION"));
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(parse_err(lineno, "expected `KEY: value` header line"));
        };
        match key.trim() {
            "PROBLEM NAME" => name = Some(value.trim().to_string()),
            "DIMENSION" => dimension = Some(parse_field(value, lineno, "DIMENSION")?),
            "NUMBER OF ITEMS" => num_items = Some(parse_field(value, lineno, "NUMBER OF ITEMS")?),
            "CAPACITY OF KNAPSACK" => {
                capacity = Some(parse_field(value, lineno, "CAPACITY OF KNAPSACK")?)
            }
            "MIN SPEED" => v_min = Some(parse_field(value, lineno, "MIN SPEED")?),
            "MAX SPEED" => v_max = Some(parse_field(value, lineno, "MAX SPEED")?),
            "RENTING RATIO" => rent = Some(parse_field(value, lineno, "RENTING RATIO")?),
            "EDGE_WEIGHT_TYPE" => {
                rounding = Some(match value.trim() {
                    "EUC_2D" => Rounding::None,
                    "CEIL_2D" => Rounding::Ceil,
                    other => {
                        return Err(parse_err(
                            lineno,
                            format!("unsupported EDGE_WEIGHT_TYPE `{other}`"),
                        ))
                    }
                })
            }
            _ => {} // unknown headers are ignored
        }
        pos += 1;
    }

    let section_line = pos + 1;
    let missing = |key: &str| parse_err(section_line, format!("missing header `{key}`"));
    let name = name.ok_or_else(|| missing("PROBLEM NAME"))?;
    let n = dimension.ok_or_else(|| missing("DIMENSION"))?;
    let m = num_items.ok_or_else(|| missing("NUMBER OF ITEMS"))?;
    let capacity = capacity.ok_or_else(|| missing("CAPACITY OF KNAPSACK"))?;
    let v_min = v_min.ok_or_else(|| missing("MIN SPEED"))?;
    let v_max = v_max.ok_or_else(|| missing("MAX SPEED"))?;
    let rent = rent.ok_or_else(|| missing("RENTING RATIO"))?;
    let rounding = rounding.ok_or_else(|| missing("EDGE_WEIGHT_TYPE"))?;
    pos += 1;

    let mut next_row = |pos: &mut usize| -> Option<(usize, &str)> {
        while let Some(raw) = lines.get(*pos) {
            *pos += 1;
            let line = raw.trim();
            if !line.is_empty() {
                return Some((*pos, line));
            }
        }
        None
    };

    let mut cities = Vec::with_capacity(n.min(1 << 20));
    for i in 1..=n {
        let Some((lineno, line)) = next_row(&mut pos) else {
            return Err(parse_err(
                lines.len().max(1),
                format!("NODE_COORD_SECTION has {} rows, DIMENSION declares {n}", i - 1),
            ));
        };
        if line.starts_with("ITEMS SECTION") {
            return Err(parse_err(
                lineno,
                format!("NODE_COORD_SECTION has {} rows, DIMENSION declares {n}", i - 1),
            ));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(lineno, "expected 3 fields: INDEX X Y"));
        }
        let index: usize = parse_field(fields[0], lineno, "city index")?;
        if index != i {
            return Err(parse_err(lineno, format!("city row index {index}, expected {i}")));
        }
        cities.push(City {
            index,
            x: parse_field(fields[1], lineno, "city X coordinate")?,
            y: parse_field(fields[2], lineno, "city Y coordinate")?,
        });
    }

    let Some((lineno, line)) = next_row(&mut pos) else {
        return Err(parse_err(lines.len().max(1), "missing ITEMS SECTION"));
    };
    if !line.starts_with("ITEMS SECTION") {
        return Err(parse_err(lineno, "expected ITEMS SECTION header"));
    }

    let mut items = Vec::with_capacity(m.min(1 << 20));
    for i in 1..=m {
        let Some((lineno, line)) = next_row(&mut pos) else {
            return Err(parse_err(
                lines.len().max(1),
                format!("ITEMS SECTION has {} rows, header declares {m}", i - 1),
            ));
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(lineno, "expected 4 fields: INDEX PROFIT WEIGHT NODE"));
        }
        let index: usize = parse_field(fields[0], lineno, "item index")?;
        if index != i {
            return Err(parse_err(lineno, format!("item row index {index}, expected {i}")));
        }
        items.push(Item {
            index,
            profit: parse_field(fields[1], lineno, "item profit")?,
            weight: parse_field(fields[2], lineno, "item weight")?,
            city: parse_field(fields[3], lineno, "item node")?,
        });
    }

    while let Some(raw) = lines.get(pos) {
        if !raw.trim().is_empty() {
            return Err(parse_err(pos + 1, "unexpected content after item rows"));
        }
        pos += 1;
    }

    Ok(TtpInstance {
        name,
        cities,
        items,
        speed: SpeedModel { v_max, v_min, capacity },
        rent,
        rounding,
    })
}

/// Renders a well-formed instance back into the text format.
///
/// Numbers print with shortest round-trip precision, so parsing the output
/// reproduces the instance exactly. Fails with the validation report if the
/// instance is not well-formed.
pub fn serialize_instance(inst: &TtpInstance) -> Result<String, InstanceError> {
    let violations = validate_instance(inst);
    if !violations.is_empty() {
        return Err(InstanceError::Invalid(violations));
    }
    use fmt::Write;
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "PROBLEM NAME: {}", inst.name).unwrap();
    writeln!(w, "DIMENSION: {}", inst.cities.len()).unwrap();
    writeln!(w, "NUMBER OF ITEMS: {}", inst.items.len()).unwrap();
    writeln!(w, "CAPACITY OF KNAPSACK: {}", inst.speed.capacity).unwrap();
    writeln!(w, "MIN SPEED: {}", inst.speed.v_min).unwrap();
    writeln!(w, "MAX SPEED: {}", inst.speed.v_max).unwrap();
    writeln!(w, "RENTING RATIO: {}", inst.rent).unwrap();
    let ewt = match inst.rounding {
        Rounding::None => "EUC_2D",
        Rounding::Ceil => "CEIL_2D",
    };
    writeln!(w, "EDGE_WEIGHT_TYPE: {ewt}").unwrap();
    writeln!(w, "NODE_COORD_SECTION (INDEX, X, Y):").unwrap();
    for city in &inst.cities {
        writeln!(w, "{} {} {}", city.index, city.x, city.y).unwrap();
    }
    writeln!(w, "ITEMS SECTION (INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):").unwrap();
    for item in &inst.items {
        writeln!(w, "{} {} {} {}", item.index, item.profit, item.weight, item.city).unwrap();
    }
    Ok(out)
}

/// Knapsack hardness class for generated items.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KpClass {
    /// Profit and weight drawn independently from `U[1, 1000]`.
    Uncorrelated,
    /// Weight from `U[1, 1000]`, profit `weight + U[-100, 100]` clamped to 1.
    WeaklyCorrelated,
    /// Profit is exactly `weight + 100`.
    BoundedStronglyCorrelated,
}

impl KpClass {
    fn short_name(self) -> &'static str {
        match self {
            KpClass::Uncorrelated => "uncorr",
            KpClass::WeaklyCorrelated => "weak",
            KpClass::BoundedStronglyCorrelated => "bsc",
        }
    }
}

impl fmt::Display for KpClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            KpClass::Uncorrelated => "uncorrelated",
            KpClass::WeaklyCorrelated => "weakly-correlated",
            KpClass::BoundedStronglyCorrelated => "bounded-strongly-correlated",
        };
        f.write_str(s)
    }
}

impl FromStr for KpClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uncorrelated" | "uncorr" => Ok(KpClass::Uncorrelated),
            "weakly-correlated" | "weak" => Ok(KpClass::WeaklyCorrelated),
            "bounded-strongly-correlated" | "bsc" => Ok(KpClass::BoundedStronglyCorrelated),
            other => Err(format!(
                "unknown knapsack class `{other}` (expected uncorrelated, \
                 weakly-correlated, or bounded-strongly-correlated)"
            )),
        }
    }
}

/// Parameters for [`generate_instance`]. Generation is a pure function of
/// this struct: the same config always yields the same instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n_cities: usize,
    /// Items placed at every city except the depot.
    pub items_per_city: usize,
    pub kp_class: KpClass,
    /// Knapsack capacity as a fraction of total item weight.
    pub capacity_factor: f64,
    /// Coordinates are uniform in `[0, coordinate_range]` on both axes.
    pub coordinate_range: f64,
    pub rent: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub seed: u64,
}

/// Generates a random instance from `cfg`.
///
/// The pseudo-random stream is ChaCha8 seeded with `cfg.seed`. Draw order is
/// fixed: first `x, y` per city for cities `1..=n`, then per non-depot city
/// in index order, per item, the weight followed by the profit (classes that
/// derive profit from weight draw only what they need). Profits and weights
/// are integers in `[1, 1000]`; the capacity is
/// `round(capacity_factor * total_weight)`, at least 1.
pub fn generate_instance(cfg: &GeneratorConfig) -> Result<TtpInstance, InstanceError> {
    let mut problems = Vec::new();
    if cfg.n_cities < 2 {
        problems.push("n_cities: must be at least 2".to_string());
    }
    if !cfg.capacity_factor.is_finite() || cfg.capacity_factor <= 0.0 {
        problems.push("capacity_factor: must be a positive real".to_string());
    }
    if !cfg.coordinate_range.is_finite() || cfg.coordinate_range <= 0.0 {
        problems.push("coordinate_range: must be a positive real".to_string());
    }
    if !cfg.rent.is_finite() || cfg.rent < 0.0 {
        problems.push("rent: must be a non-negative real".to_string());
    }
    if !cfg.v_min.is_finite() || cfg.v_min <= 0.0 {
        problems.push("v_min: must be positive".to_string());
    }
    if !cfg.v_max.is_finite() || cfg.v_max <= 0.0 {
        problems.push("v_max: must be positive".to_string());
    }
    if cfg.v_min.is_finite() && cfg.v_max.is_finite() && cfg.v_min > cfg.v_max {
        problems.push("v_min: exceeds v_max".to_string());
    }
    if !problems.is_empty() {
        return Err(InstanceError::InvalidConfig(problems));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_cities;

    let cities: Vec<City> = (1..=n)
        .map(|index| {
            let x = rng.gen_range(0.0..=cfg.coordinate_range);
            let y = rng.gen_range(0.0..=cfg.coordinate_range);
            City { index, x, y }
        })
        .collect();

    let mut items = Vec::with_capacity((n - 1) * cfg.items_per_city);
    for city in 2..=n {
        for _ in 0..cfg.items_per_city {
            let weight = rng.gen_range(1..=1000) as f64;
            let profit = match cfg.kp_class {
                KpClass::Uncorrelated => rng.gen_range(1..=1000) as f64,
                KpClass::WeaklyCorrelated => {
                    (weight + rng.gen_range(-100..=100) as f64).max(1.0)
                }
                KpClass::BoundedStronglyCorrelated => weight + 100.0,
            };
            items.push(Item { index: items.len() + 1, profit, weight, city });
        }
    }

    let total_weight: f64 = items.iter().map(|it| it.weight).sum();
    let capacity = (cfg.capacity_factor * total_weight).round().max(1.0);

    Ok(TtpInstance {
        name: format!(
            "gen-n{}-i{}-{}-s{}",
            n,
            cfg.items_per_city,
            cfg.kp_class.short_name(),
            cfg.seed
        ),
        cities,
        items,
        speed: SpeedModel { v_max: cfg.v_max, v_min: cfg.v_min, capacity },
        rent: cfg.rent,
        rounding: Rounding::None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{sample3, SAMPLE3};

    fn base_config(seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            n_cities: 5,
            items_per_city: 2,
            kp_class: KpClass::Uncorrelated,
            capacity_factor: 0.5,
            coordinate_range: 100.0,
            rent: 1.0,
            v_min: 0.1,
            v_max: 1.0,
            seed,
        }
    }

    #[test]
    fn distance_345_triangle() {
        let inst = sample3();
        assert_eq!(inst.distance(1, 2).unwrap(), 3.0);
        assert_eq!(inst.distance(2, 3).unwrap(), 4.0);
        assert_eq!(inst.distance(1, 3).unwrap(), 5.0);
        assert_eq!(inst.distance(3, 1).unwrap(), 5.0);
        assert_eq!(inst.distance(2, 2).unwrap(), 0.0);
    }

    #[test]
    fn distance_ceil_rounds_up() {
        let mut inst = sample3();
        inst.rounding = Rounding::Ceil;
        inst.cities[1].x = 1.0;
        inst.cities[1].y = 1.0;
        // sqrt(2) rounds up to 2 under CEIL_2D
        assert_eq!(inst.distance(1, 2).unwrap(), 2.0);
    }

    #[test]
    fn distance_rejects_bad_index() {
        let inst = sample3();
        assert!(inst.distance(0, 1).is_err());
        assert!(inst.distance(1, 4).is_err());
    }

    #[test]
    fn validate_clean_instance() {
        assert!(validate_instance(&sample3()).is_empty());
    }

    #[test]
    fn validate_flags_speed_inversion() {
        let mut inst = sample3();
        inst.speed.v_min = 2.0;
        let violations = validate_instance(&inst);
        assert!(violations.contains(&"speed: v_min exceeds v_max".to_string()));
    }

    #[test]
    fn validate_flags_depot_item() {
        let mut inst = sample3();
        inst.items[0].city = 1;
        let violations = validate_instance(&inst);
        assert!(violations.contains(&"item 1: assigned to depot".to_string()));
    }

    #[test]
    fn validate_flags_bad_weight_and_profit() {
        let mut inst = sample3();
        inst.items[0].weight = 0.0;
        inst.items[1].profit = -1.0;
        let violations = validate_instance(&inst);
        assert!(violations.iter().any(|v| v.starts_with("item 1: weight")));
        assert!(violations.iter().any(|v| v.starts_with("item 2: profit")));
    }

    #[test]
    fn parse_sample3_fields() {
        let inst = sample3();
        assert_eq!(inst.name, "sample3");
        assert_eq!(inst.num_cities(), 3);
        assert_eq!(inst.num_items(), 2);
        assert_eq!(inst.speed.capacity, 5.0);
        assert_eq!(inst.speed.v_min, 0.1);
        assert_eq!(inst.speed.v_max, 1.0);
        assert_eq!(inst.rent, 1.0);
        assert_eq!(inst.rounding, Rounding::None);
        assert_eq!(inst.items[1], Item { index: 2, profit: 40.0, weight: 2.0, city: 3 });
    }

    #[test]
    fn parse_minimal_zero_item_file() {
        let text = "\
PROBLEM NAME: tiny
DIMENSION: 2
NUMBER OF ITEMS: 0
CAPACITY OF KNAPSACK: 1
MIN SPEED: 0.5
MAX SPEED: 1.0
RENTING RATIO: 0.0
EDGE_WEIGHT_TYPE: EUC_2D
NODE_COORD_SECTION (INDEX, X, Y):
1 0 0
2 1 0
ITEMS SECTION (INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):
";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.num_cities(), 2);
        assert_eq!(inst.num_items(), 0);
        assert!(validate_instance(&inst).is_empty());
    }

    #[test]
    fn parse_accepts_headers_in_any_order_and_unknown_keys() {
        let text = "\
DIMENSION: 2
KNAPSACK DATA TYPE: whatever
PROBLEM NAME: shuffled
EDGE_WEIGHT_TYPE: CEIL_2D
RENTING RATIO: 2.5
MAX SPEED: 1.0
MIN SPEED: 0.1
NUMBER OF ITEMS: 1
CAPACITY OF KNAPSACK: 3
NODE_COORD_SECTION (INDEX, X, Y):
1 0 0
2 0 7.25
ITEMS SECTION (INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):
1 10 3 2
";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.name, "shuffled");
        assert_eq!(inst.rounding, Rounding::Ceil);
        assert_eq!(inst.cities[1].y, 7.25);
    }

    #[test]
    fn parse_reports_missing_header() {
        let text = "\
PROBLEM NAME: broken
DIMENSION: 2
NUMBER OF ITEMS: 0
CAPACITY OF KNAPSACK: 1
MIN SPEED: 0.5
MAX SPEED: 1.0
EDGE_WEIGHT_TYPE: EUC_2D
NODE_COORD_SECTION (INDEX, X, Y):
1 0 0
2 1 0
ITEMS SECTION (INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):
";
        let err = parse_instance(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("RENTING RATIO"), "unexpected error: {msg}");
    }

    #[test]
    fn parse_reports_item_count_mismatch_line() {
        let text = "\
PROBLEM NAME: short
DIMENSION: 2
NUMBER OF ITEMS: 2
CAPACITY OF KNAPSACK: 5
MIN SPEED: 0.1
MAX SPEED: 1.0
RENTING RATIO: 1.0
EDGE_WEIGHT_TYPE: EUC_2D
NODE_COORD_SECTION (INDEX, X, Y):
1 0 0
2 1 0
ITEMS SECTION (INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):
1 10 3 2
";
        match parse_instance(text).unwrap_err() {
            InstanceError::Parse { line, message } => {
                assert_eq!(line, 13);
                assert!(message.contains("1 rows, header declares 2"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_reports_malformed_row() {
        let text = SAMPLE3.replace("2 3 0", "2 3");
        match parse_instance(&text).unwrap_err() {
            InstanceError::Parse { line, message } => {
                assert_eq!(line, 11);
                assert!(message.contains("3 fields"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_unknown_edge_weight_type() {
        let text = SAMPLE3.replace("EUC_2D", "GEO");
        assert!(matches!(parse_instance(&text), Err(InstanceError::Parse { line: 8, .. })));
    }

    #[test]
    fn serialize_round_trips_sample3() {
        let inst = sample3();
        let text = serialize_instance(&inst).unwrap();
        assert!(text.contains("DIMENSION: 3"));
        assert!(text.contains("CAPACITY OF KNAPSACK: 5"));
        let reparsed = parse_instance(&text).unwrap();
        assert_eq!(inst, reparsed);
    }

    #[test]
    fn serialize_rejects_invalid_instance() {
        let mut inst = sample3();
        inst.speed.capacity = -1.0;
        assert!(matches!(serialize_instance(&inst), Err(InstanceError::Invalid(_))));
    }

    #[test]
    fn generate_is_deterministic_per_seed() {
        let a = generate_instance(&base_config(42)).unwrap();
        let b = generate_instance(&base_config(42)).unwrap();
        let c = generate_instance(&base_config(43)).unwrap();
        assert_eq!(serialize_instance(&a).unwrap(), serialize_instance(&b).unwrap());
        assert_ne!(serialize_instance(&a).unwrap(), serialize_instance(&c).unwrap());
    }

    #[test]
    fn generate_respects_structure() {
        let cfg = base_config(7);
        let inst = generate_instance(&cfg).unwrap();
        assert_eq!(inst.num_cities(), 5);
        assert_eq!(inst.num_items(), 8);
        assert!(validate_instance(&inst).is_empty());
        assert!(inst.items.iter().all(|it| it.city >= 2));
        assert!(inst.items.iter().all(|it| (1.0..=1000.0).contains(&it.weight)));
        let expected_capacity = (0.5 * inst.total_item_weight()).round().max(1.0);
        assert_eq!(inst.speed.capacity, expected_capacity);
    }

    #[test]
    fn generate_bounded_strongly_correlated_offsets() {
        let mut cfg = base_config(11);
        cfg.kp_class = KpClass::BoundedStronglyCorrelated;
        let inst = generate_instance(&cfg).unwrap();
        assert!(inst.items.iter().all(|it| it.profit == it.weight + 100.0));
    }

    #[test]
    fn generate_weakly_correlated_stays_near_weight() {
        let mut cfg = base_config(13);
        cfg.kp_class = KpClass::WeaklyCorrelated;
        cfg.n_cities = 30;
        let inst = generate_instance(&cfg).unwrap();
        assert!(inst
            .items
            .iter()
            .all(|it| it.profit >= 1.0 && (it.profit - it.weight).abs() <= 100.0));
    }

    #[test]
    fn generate_zero_items_per_city() {
        let mut cfg = base_config(3);
        cfg.items_per_city = 0;
        let inst = generate_instance(&cfg).unwrap();
        assert_eq!(inst.num_items(), 0);
        assert_eq!(inst.speed.capacity, 1.0);
        assert!(validate_instance(&inst).is_empty());
    }

    #[test]
    fn generate_rejects_bad_config() {
        let mut cfg = base_config(1);
        cfg.n_cities = 1;
        cfg.capacity_factor = 0.0;
        match generate_instance(&cfg).unwrap_err() {
            InstanceError::InvalidConfig(problems) => assert_eq!(problems.len(), 2),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn kp_class_parses_and_displays() {
        for class in [
            KpClass::Uncorrelated,
            KpClass::WeaklyCorrelated,
            KpClass::BoundedStronglyCorrelated,
        ] {
            assert_eq!(class.to_string().parse::<KpClass>().unwrap(), class);
        }
        assert!("plutonium".parse::<KpClass>().is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_config() -> impl Strategy<Value = GeneratorConfig> {
            (
                2usize..8,
                0usize..3,
                0usize..3,
                1u32..8,
                0u64..1_000_000,
            )
                .prop_map(|(n, ipc, class, cap, seed)| GeneratorConfig {
                    n_cities: n,
                    items_per_city: ipc,
                    kp_class: match class {
                        0 => KpClass::Uncorrelated,
                        1 => KpClass::WeaklyCorrelated,
                        _ => KpClass::BoundedStronglyCorrelated,
                    },
                    capacity_factor: f64::from(cap) * 0.125,
                    coordinate_range: 100.0,
                    rent: 1.5,
                    v_min: 0.1,
                    v_max: 1.0,
                    seed,
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn parse_serialize_identity(cfg in arb_config()) {
                let inst = generate_instance(&cfg).unwrap();
                let text = serialize_instance(&inst).unwrap();
                let reparsed = parse_instance(&text).unwrap();
                prop_assert_eq!(inst, reparsed);
            }

            #[test]
            fn generated_instances_validate(cfg in arb_config()) {
                let inst = generate_instance(&cfg).unwrap();
                prop_assert!(validate_instance(&inst).is_empty());
            }

            #[test]
            fn distance_symmetric_zero_diagonal(cfg in arb_config()) {
                let inst = generate_instance(&cfg).unwrap();
                let n = inst.num_cities();
                for j in 1..=n {
                    prop_assert_eq!(inst.distance(j, j).unwrap(), 0.0);
                    for k in 1..=n {
                        prop_assert_eq!(
                            inst.distance(j, k).unwrap(),
                            inst.distance(k, j).unwrap()
                        );
                    }
                }
            }
        }
    }
}
