use std::collections::BTreeSet;
use std::sync::Arc;

use super::bus::Bus;
use super::schema::{AttributeSchema, FieldId, FieldValues, Nibble};
use crate::error::{Error, Result};

/// The conscious register: the bus bits plus a remaining-ticks counter per
/// field. A field whose counter is 0 has expired and holds all-zero bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StmWord {
    schema: Arc<AttributeSchema>,
    bits: Bus,
    ttl: Vec<u32>,
    ttl_max: u32,
}

impl StmWord {
    pub fn new(schema: Arc<AttributeSchema>, ttl_max: u32) -> Self {
        let bits = Bus::zeros(schema.bus_width());
        let ttl = vec![0; schema.len()];
        StmWord {
            schema,
            bits,
            ttl,
            ttl_max,
        }
    }

    pub fn schema(&self) -> &Arc<AttributeSchema> {
        &self.schema
    }

    pub fn bits(&self) -> &Bus {
        &self.bits
    }

    pub fn ttl_max(&self) -> u32 {
        self.ttl_max
    }

    pub fn ttl(&self, field: FieldId) -> u32 {
        self.ttl[field.0]
    }

    pub fn read(&self, field: FieldId) -> Nibble {
        Nibble::new(self.bits.nibble(field.lsb())).unwrap()
    }

    pub fn read_named(&self, name: &str) -> Result<Nibble> {
        Ok(self.read(self.schema.id(name)?))
    }

    pub fn is_live(&self, field: FieldId) -> bool {
        self.ttl[field.0] > 0
    }

    /// Fields that are both unexpired and nonzero, in bus order.
    pub fn live_values(&self) -> FieldValues {
        self.schema
            .ids()
            .filter(|&id| self.is_live(id))
            .map(|id| (id, self.read(id)))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }

    pub fn is_blank(&self) -> bool {
        self.bits.count_ones() == 0
    }

    pub fn write_field(&mut self, field: FieldId, nibble: Nibble, ttl: u32) -> Result<()> {
        self.schema.check(field)?;
        if ttl > self.ttl_max {
            return Err(Error::TtlTooLarge {
                ttl,
                max: self.ttl_max,
            });
        }
        self.ttl[field.0] = ttl;
        let value = if ttl == 0 { 0 } else { nibble.value() };
        self.bits.set_nibble(field.lsb(), value);
        Ok(())
    }

    pub fn write_named(&mut self, field: &str, nibble: Nibble, ttl: u32) -> Result<()> {
        let id = self.schema.id(field)?;
        self.write_field(id, nibble, ttl)
    }

    /// One tick of persistence: live counters drop by one and fields that
    /// reach zero return to rest.
    pub fn tick_decay(&mut self) {
        for id in 0..self.ttl.len() {
            if self.ttl[id] > 0 {
                self.ttl[id] -= 1;
                if self.ttl[id] == 0 {
                    self.bits.set_nibble(FieldId(id).lsb(), 0);
                }
            }
        }
    }

    /// Every field `incoming` defines overwrites STM and refreshes its ttl;
    /// everything else lingers untouched.
    pub fn dominate(&mut self, incoming: &FieldValues, ttl: u32) -> Result<()> {
        self.dominate_except(incoming, ttl, &BTreeSet::new())
    }

    /// As [`dominate`](Self::dominate), but leaves the `keep` fields alone.
    pub fn dominate_except(
        &mut self,
        incoming: &FieldValues,
        ttl: u32,
        keep: &BTreeSet<FieldId>,
    ) -> Result<()> {
        self.schema.check_values(incoming)?;
        if ttl > self.ttl_max {
            return Err(Error::TtlTooLarge {
                ttl,
                max: self.ttl_max,
            });
        }
        for (&id, &value) in incoming {
            if !keep.contains(&id) {
                self.write_field(id, value, ttl)?;
            }
        }
        Ok(())
    }

    /// Installs bus contents produced by nanocode. Fields in `touched` that
    /// end up nonzero get a fresh ttl; touched fields left at zero expire.
    pub fn replace_bits(&mut self, bits: Bus, touched: &BTreeSet<FieldId>) {
        assert_eq!(bits.width(), self.bits.width(), "bus width mismatch");
        self.bits = bits;
        for &id in touched {
            let nonzero = !self.read(id).is_zero();
            self.ttl[id.0] = if nonzero { self.ttl_max } else { 0 };
        }
        // untouched expired fields must still read zero
        for id in self.schema.ids() {
            if self.ttl[id.0] == 0 {
                self.bits.set_nibble(id.lsb(), 0);
            }
        }
    }

    /// `name=value` for every nonzero field, comma separated; `-` when blank.
    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .schema
            .ids()
            .filter(|&id| !self.read(id).is_zero())
            .map(|id| format!("{}={}", self.schema.name(id), self.read(id).value()))
            .collect();
        if parts.is_empty() {
            "-".to_string()
        } else {
            parts.join(",")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stm() -> StmWord {
        let schema = AttributeSchema::rational(["problem_B", "problem_Y", "action"]).unwrap();
        StmWord::new(Arc::new(schema), 30)
    }

    fn n(v: u8) -> Nibble {
        Nibble::new(v).unwrap()
    }

    #[test]
    fn write_then_read() {
        let mut s = stm();
        s.write_named("problem_Y", n(11), 30).unwrap();
        assert_eq!(s.read_named("problem_Y").unwrap(), n(11));
        assert_eq!(s.read_named("problem_B").unwrap(), n(0));
        assert_eq!(s.bits().to_string(), "0000_1011_0000");
    }

    #[test]
    fn write_zero_and_overwrite() {
        let mut s = stm();
        s.write_named("problem_Y", n(0), 30).unwrap();
        assert_eq!(s.read_named("problem_Y").unwrap(), n(0));
        s.write_named("problem_Y", n(11), 10).unwrap();
        s.tick_decay();
        s.write_named("problem_Y", n(6), 30).unwrap();
        let y = s.schema().id("problem_Y").unwrap();
        assert_eq!(s.read(y), n(6));
        assert_eq!(s.ttl(y), 30);
    }

    #[test]
    fn write_errors() {
        let mut s = stm();
        assert_eq!(
            s.write_named("nope", n(1), 1),
            Err(Error::UnknownField("nope".into()))
        );
        assert_eq!(
            s.write_named("problem_Y", n(1), 31),
            Err(Error::TtlTooLarge { ttl: 31, max: 30 })
        );
    }

    #[test]
    fn expiry_boundary() {
        let mut s = stm();
        s.write_named("problem_B", n(5), 1).unwrap();
        s.tick_decay();
        assert_eq!(s.read_named("problem_B").unwrap(), n(0));
    }

    #[test]
    fn thirty_tick_persistence() {
        let mut s = stm();
        s.write_named("problem_Y", n(11), 30).unwrap();
        for _ in 0..29 {
            s.tick_decay();
        }
        assert_eq!(s.read_named("problem_Y").unwrap(), n(11));
        s.tick_decay();
        assert_eq!(s.read_named("problem_Y").unwrap(), n(0));
    }

    #[test]
    fn decay_of_blank_stm_is_identity() {
        let mut s = stm();
        let before = s.clone();
        s.tick_decay();
        assert_eq!(s, before);
    }

    #[test]
    fn domination_overwrites_defined_fields_only() {
        let mut s = stm();
        let b = s.schema().id("problem_B").unwrap();
        let a = s.schema().id("action").unwrap();
        s.write_field(b, n(1), 5).unwrap();
        let incoming: FieldValues = [(a, n(2))].into();
        s.dominate(&incoming, 30).unwrap();
        assert_eq!(s.read(a), n(2));
        assert_eq!(s.ttl(a), 30);
        assert_eq!(s.read(b), n(1));
        assert_eq!(s.ttl(b), 5);

        let before = s.clone();
        s.dominate(&FieldValues::new(), 30).unwrap();
        assert_eq!(s, before);

        s.dominate(&[(a, n(1))].into(), 30).unwrap();
        s.dominate(&[(a, n(3))].into(), 30).unwrap();
        assert_eq!(s.read(a), n(3));
    }

    #[test]
    fn domination_rejects_foreign_fields() {
        let mut s = stm();
        let bad: FieldValues = [(FieldId(9), n(1))].into();
        assert!(matches!(
            s.dominate(&bad, 30),
            Err(Error::FieldOutOfRange { index: 9, .. })
        ));
    }

    #[test]
    fn domination_is_idempotent() {
        let mut s = stm();
        let y = s.schema().id("problem_Y").unwrap();
        let incoming: FieldValues = [(y, n(7))].into();
        s.dominate(&incoming, 12).unwrap();
        let once = s.clone();
        s.dominate(&incoming, 12).unwrap();
        assert_eq!(s, once);
    }

    #[test]
    fn live_values_skip_zero_fields() {
        let mut s = stm();
        s.write_named("problem_B", n(0), 30).unwrap();
        s.write_named("problem_Y", n(3), 30).unwrap();
        let live = s.live_values();
        assert_eq!(live.len(), 1);
    }
}
