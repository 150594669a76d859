use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};

/// Every attribute is a 4-bit field.
pub const FIELD_WIDTH: usize = 4;

/// Position of a field in the schema; also its slot on the bus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldId(pub usize);

impl FieldId {
    pub fn lsb(self) -> usize {
        self.0 * FIELD_WIDTH
    }

    pub fn bits(self) -> Range<usize> {
        self.lsb()..self.lsb() + FIELD_WIDTH
    }

    /// Bus index of bit `i` (0 = LSB) of this field.
    pub fn bit(self, i: usize) -> usize {
        debug_assert!(i < FIELD_WIDTH);
        self.lsb() + i
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rational,
    Irrational,
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldKind::Rational => "rational",
            FieldKind::Irrational => "irrational",
        })
    }
}

/// A 4-bit attribute value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Nibble(u8);

impl Nibble {
    pub const ZERO: Nibble = Nibble(0);
    pub const MAX: u8 = (1 << FIELD_WIDTH) - 1;

    pub fn new(value: u8) -> Option<Nibble> {
        (value <= Self::MAX).then_some(Nibble(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Bits LSB first, in bus order.
    pub fn bits(self) -> [bool; FIELD_WIDTH] {
        std::array::from_fn(|i| self.0 >> i & 1 == 1)
    }
}

impl TryFrom<i64> for Nibble {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        u8::try_from(value)
            .ok()
            .and_then(Nibble::new)
            .ok_or(Error::ValueOverflow {
                value,
                width: FIELD_WIDTH,
            })
    }
}

/// Binary, MSB first: `11` prints as `1011`.
impl fmt::Display for Nibble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04b}", self.0)
    }
}

/// A partial assignment of attribute values, keyed in bus order.
pub type FieldValues = BTreeMap<FieldId, Nibble>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDescriptor {
    pub name: String,
    pub kind: FieldKind,
}

/// Ordered list of named 4-bit attributes. Field `f` covers bus bits
/// `[4f, 4f+3]`, bit `4f` least significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSchema {
    fields: Vec<FieldDescriptor>,
    by_name: HashMap<String, FieldId>,
}

impl AttributeSchema {
    pub fn new(fields: impl IntoIterator<Item = FieldDescriptor>) -> Result<Self> {
        let fields: Vec<_> = fields.into_iter().collect();
        let mut by_name = HashMap::with_capacity(fields.len());
        for (i, field) in fields.iter().enumerate() {
            if by_name.insert(field.name.clone(), FieldId(i)).is_some() {
                return Err(Error::DuplicateField(field.name.clone()));
            }
        }
        Ok(AttributeSchema { fields, by_name })
    }

    /// Convenience constructor: all fields rational.
    pub fn rational<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::new(names.into_iter().map(|n| FieldDescriptor {
            name: n.as_ref().to_string(),
            kind: FieldKind::Rational,
        }))
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn bus_width(&self) -> usize {
        FIELD_WIDTH * self.fields.len()
    }

    pub fn fields(&self) -> &[FieldDescriptor] {
        &self.fields
    }

    pub fn ids(&self) -> impl Iterator<Item = FieldId> + '_ {
        (0..self.fields.len()).map(FieldId)
    }

    pub fn id(&self, name: &str) -> Result<FieldId> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownField(name.to_string()))
    }

    pub fn lookup(&self, name: &str) -> Option<FieldId> {
        self.by_name.get(name).copied()
    }

    pub fn check(&self, id: FieldId) -> Result<FieldId> {
        if id.0 < self.fields.len() {
            Ok(id)
        } else {
            Err(Error::FieldOutOfRange {
                index: id.0,
                fields: self.fields.len(),
            })
        }
    }

    pub fn name(&self, id: FieldId) -> &str {
        &self.fields[id.0].name
    }

    pub fn kind(&self, id: FieldId) -> FieldKind {
        self.fields[id.0].kind
    }

    /// Bus mask of a field, as a set of bit indices.
    pub fn mask(&self, id: FieldId) -> Range<usize> {
        id.bits()
    }

    /// The field holding recalled action codes, when the schema has one.
    pub fn action_field(&self) -> Option<FieldId> {
        self.lookup(super::codes::ACTION_FIELD)
    }

    pub fn encode_value(&self, field: &str, value: i64) -> Result<Nibble> {
        self.id(field)?;
        Nibble::try_from(value)
    }

    pub fn decode_value(&self, nibble: Nibble) -> u8 {
        nibble.value()
    }

    pub fn check_values(&self, values: &FieldValues) -> Result<()> {
        values.keys().try_for_each(|&id| self.check(id).map(drop))
    }

    /// `name=value` pairs separated by spaces, in bus order.
    pub fn render_values(&self, values: &FieldValues) -> String {
        values
            .iter()
            .map(|(&id, v)| format!("{}={}", self.name(id), v.value()))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equation() -> AttributeSchema {
        AttributeSchema::rational(["problem_A", "problem_B", "problem_Y"]).unwrap()
    }

    #[test]
    fn encode_examples() {
        let s = equation();
        assert_eq!(s.encode_value("problem_Y", 11).unwrap().to_string(), "1011");
        assert_eq!(s.encode_value("problem_B", 0).unwrap().to_string(), "0000");
        assert_eq!(s.encode_value("problem_B", 5).unwrap().to_string(), "0101");
    }

    #[test]
    fn encode_errors() {
        let s = equation();
        assert_eq!(
            s.encode_value("problem_Q", 1),
            Err(Error::UnknownField("problem_Q".into()))
        );
        assert!(matches!(
            s.encode_value("problem_Y", 16),
            Err(Error::ValueOverflow { value: 16, .. })
        ));
        assert!(s.encode_value("problem_Y", -1).is_err());
    }

    #[test]
    fn encode_decode_identity_exhaustive() {
        let s = equation();
        for v in 0..16 {
            let n = s.encode_value("problem_A", v).unwrap();
            assert_eq!(s.decode_value(n) as i64, v);
        }
    }

    #[test]
    fn lsb_sits_at_lowest_bus_bit() {
        let n = Nibble::new(0b1011).unwrap();
        assert_eq!(n.bits(), [true, true, false, true]);
        assert_eq!(FieldId(5).bits(), 20..24);
        assert_eq!(FieldId(5).bit(0), 20);
    }

    #[test]
    fn masks_partition_the_bus() {
        let s = AttributeSchema::rational((0..16).map(|i| format!("f{i}"))).unwrap();
        let mut covered = vec![0u8; s.bus_width()];
        for id in s.ids() {
            for bit in s.mask(id) {
                covered[bit] += 1;
            }
        }
        assert!(covered.iter().all(|&c| c == 1));
        assert_eq!(s.bus_width(), 64);
    }

    #[test]
    fn duplicate_names_rejected() {
        assert_eq!(
            AttributeSchema::rational(["a", "b", "a"]),
            Err(Error::DuplicateField("a".into()))
        );
    }
}
