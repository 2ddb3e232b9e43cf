"""Turbo product codes with eBCH components: Chase-II list decoding and max-log soft output."""
