from .numerology import Numerology, numerology_for_bw
from .mcs import MCS_TABLE, McsEntry, build_mcs_table, mcs_entry, payload_bits, peak_throughput_mbps
from .modulation import modulate, demodulate_soft
from .codec import CODEC_VERSION, DEFAULT_CODEC, CodecSpec, decode_batch, decode_block, encode_batch, encode_block

__all__ = [
    "Numerology", "numerology_for_bw", "MCS_TABLE", "McsEntry", "build_mcs_table", "mcs_entry",
    "payload_bits", "peak_throughput_mbps", "modulate", "demodulate_soft", "CODEC_VERSION",
    "DEFAULT_CODEC", "CodecSpec", "decode_batch", "decode_block", "encode_batch", "encode_block",
]
