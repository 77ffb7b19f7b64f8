package org.example.codec;

import java.nio.charset.StandardCharsets;

public class Base64Codec implements BinaryEncoder, BinaryDecoder {

    private static final char[] ALPHABET =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/".toCharArray();
    private static final char PAD = '=';

    @Override
    public byte[] encode(byte[] input) {
        StringBuilder out = new StringBuilder();
        for (int i = 0; i < input.length; i += 3) {
            int b = (input[i] & 0xff) << 16;
            if (i + 1 < input.length) b |= (input[i + 1] & 0xff) << 8;
            if (i + 2 < input.length) b |= input[i + 2] & 0xff;
            out.append(ALPHABET[(b >> 18) & 63]);
            out.append(ALPHABET[(b >> 12) & 63]);
            out.append(i + 1 < input.length ? ALPHABET[(b >> 6) & 63] : PAD);
            out.append(i + 2 < input.length ? ALPHABET[b & 63] : PAD);
        }
        return out.toString().getBytes(StandardCharsets.US_ASCII);
    }

    @Override
    public byte[] decode(byte[] input) {
        throw new UnsupportedOperationException("decode not implemented");
    }
}

interface BinaryEncoder {
    byte[] encode(byte[] input);
}

interface BinaryDecoder {
    byte[] decode(byte[] input);
}
