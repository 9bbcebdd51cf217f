"""Link-level simulator of an analog MIMO radio-over-copper fronthaul."""
