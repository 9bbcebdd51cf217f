"""Fading-profile constants transcribed from 3GPP TS 36.101, Annex B.

Bump ``SOURCE`` when any value changes.
"""
SOURCE = "3GPP TS 36.101 Annex B.2 (EPA profile, Table B.2.1-2; MIMO correlation, Table B.2.3.2-1)"

EPA_DELAYS_NS = (0.0, 30.0, 70.0, 90.0, 110.0, 190.0, 410.0)
EPA_POWERS_DB = (0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8)
EPA5_DOPPLER_HZ = 5.0

# (eNodeB alpha, UE beta)
CORRELATION = {
    "low": (0.0, 0.0),
    "medium": (0.3, 0.9),
    "high": (0.9, 0.9),
}

NORMAL_CP_S = 4.7e-6
