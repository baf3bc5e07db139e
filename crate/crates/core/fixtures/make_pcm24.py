"""Writes pcm24_half.wav: mono 48 kHz PCM24 holding the single sample 0x400000."""
import struct

data = bytes([0x00, 0x00, 0x40])  # little-endian 0x400000 = 2**22
pad = b"\x00" if len(data) % 2 else b""
fmt = struct.pack("<HHIIHH", 1, 1, 48000, 48000 * 3, 3, 24)
body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt
body += b"data" + struct.pack("<I", len(data)) + data + pad
with open("pcm24_half.wav", "wb") as f:
    f.write(b"RIFF" + struct.pack("<I", len(body)) + body)
print(2**22 / 2**23)
