"""8x16 monospace bitmap face (printable ASCII + Latin-1), rows MSB-left.

Generated by tools/build_font.py from DejaVu Sans Mono Bold; do not edit.
"""

GLYPHS = {
    0x0020: "00000000000000000000000000000000",
    0x0021: "00000018181818181800181800000000",
    0x0022: "00000066666666000000000000000000",
    0x0023: "0000000012167f3424fe684800000000",
    0x0024: "000008083e6a683e0b0b6b3e08080000",
    0x0025: "000000609090631ce609090600000000",
    0x0026: "0000001c303018396d67663f00000000",
    0x0027: "00000018181818000000000000000000",
    0x0028: "00081810303030303030101808000000",
    0x0029: "001018080c0c0c0c0c0c081810000000",
    0x002A: "00000010d67c7cd61000000000000000",
    0x002B: "00000000181818ffff18181800000000",
    0x002C: "00000000000000000000181810200000",
    0x002D: "000000000000003c3c00000000000000",
    0x002E: "00000000000000000000181800000000",
    0x002F: "00000002040408081810102020400000",
    0x0030: "0000001c36636b6b6363361c00000000",
    0x0031: "00000078181818181818187e00000000",
    0x0032: "0000003e430302060c18307f00000000",
    0x0033: "0000003e43031c070303473e00000000",
    0x0034: "0000000e0e1e36667f06060600000000",
    0x0035: "0000007e60607c470303473c00000000",
    0x0036: "0000001c32607e636363231e00000000",
    0x0037: "0000007f0306060c0c18183000000000",
    0x0038: "0000003e63631c636363633e00000000",
    0x0039: "0000003c626363633f03261c00000000",
    0x003A: "00000000001818000000181800000000",
    0x003B: "00000000001818000000181810200000",
    0x003C: "0000000000010f3c603c0f0100000000",
    0x003D: "0000000000007f7f007f7f0000000000",
    0x003E: "000000000040781e031e784000000000",
    0x003F: "0000001c26060c181800181800000000",
    0x0040: "0000003c625eb6a2a2a2b65e623e0000",
    0x0041: "0000001c1c1436363e36636300000000",
    0x0042: "0000007e6363637c6363637e00000000",
    0x0043: "0000001e316060606060311e00000000",
    0x0044: "0000007c666363636363667c00000000",
    0x0045: "0000007f6060607e6060607f00000000",
    0x0046: "0000007f6060607e6060606000000000",
    0x0047: "0000001e316060676363331f00000000",
    0x0048: "000000636363637f6363636300000000",
    0x0049: "0000007e181818181818187e00000000",
    0x004A: "0000000f030303030303433e00000000",
    0x004B: "00000063666c787c6c66666300000000",
    0x004C: "00000060606060606060607f00000000",
    0x004D: "000000777777777f6b63636300000000",
    0x004E: "0000007373737b6b6f67676700000000",
    0x004F: "0000001c366363636363361c00000000",
    0x0050: "0000007e636363637e60606000000000",
    0x0051: "0000001c366363636363361e06020000",
    0x0052: "0000007e636363637c66636100000000",
    0x0053: "0000003e6160703e0703433e00000000",
    0x0054: "0000007e181818181818181800000000",
    0x0055: "00000063636363636363633e00000000",
    0x0056: "000000636322363636141c1c00000000",
    0x0057: "000000c3c3dbdb5a5e66666600000000",
    0x0058: "0000006336361c081c36366300000000",
    0x0059: "000000c366663c3c1818181800000000",
    0x005A: "0000007f03060c1c1830607f00000000",
    0x005B: "001e181818181818181818181e000000",
    0x005C: "000000602020301018080c0404060000",
    0x005D: "00381818181818181818181838000000",
    0x005E: "00000038386cc6000000000000000000",
    0x005F: "0000000000000000000000000000ff00",
    0x0060: "00003018000000000000000000000000",
    0x0061: "00000000001c26063e66663e00000000",
    0x0062: "00606060607c66666666667c00000000",
    0x0063: "00000000001c32606060321c00000000",
    0x0064: "00060606063e66666666663e00000000",
    0x0065: "00000000003c66667e60623c00000000",
    0x0066: "000e1818187e18181818181800000000",
    0x0067: "00000000003e66666666663e06063c00",
    0x0068: "00606060607c66666666666600000000",
    0x0069: "00181800007818181818187e00000000",
    0x006A: "000c0c00003c0c0c0c0c0c0c0c0c7800",
    0x006B: "0060606060646c78786c6c6600000000",
    0x006C: "00f03030303030303030301e00000000",
    0x006D: "0000000000ffdbdbdbdbdbdb00000000",
    0x006E: "00000000007c66666666666600000000",
    0x006F: "00000000003c66666666663c00000000",
    0x0070: "00000000007c66666666667c60606000",
    0x0071: "00000000003e66666666663e06060600",
    0x0072: "00000000003e30303030303000000000",
    0x0073: "00000000003c62703c06463c00000000",
    0x0074: "00000018187e18181818180e00000000",
    0x0075: "00000000006666666666663e00000000",
    0x0076: "00000000006666243c3c181800000000",
    0x0077: "0000000000c3c3db5a5a666600000000",
    0x0078: "0000000000663c18183c3c6600000000",
    0x0079: "000000000066662c3c3c181818307000",
    0x007A: "00000000007e060c1830607e00000000",
    0x007B: "000e181818181860181818181e000000",
    0x007C: "00101010101010101010101010100000",
    0x007D: "00701818181818061818181878000000",
    0x007E: "00000000000039460000000000000000",
    0x00A0: "00000000000000000000000000000000",
    0x00A1: "00000000001818001818181818180000",
    0x00A2: "00000008083c6a6868686a3c08080000",
    0x00A3: "0000001c3230307c3030307e00000000",
    0x00A4: "0000000000443e24243c460000000000",
    0x00A5: "000000c36666ff18ff18181800000000",
    0x00A6: "00000010101010100000101010101000",
    0x00A7: "0000003c60303c6e663c0c063c000000",
    0x00A8: "00003636000000000000000000000000",
    0x00A9: "0000003c429da1a19d423c0000000000",
    0x00AA: "0000001c023e223e001e000000000000",
    0x00AB: "000000000012366c6c36120000000000",
    0x00AC: "0000000000007f7f0300000000000000",
    0x00AD: "00000000000000000000000000000000",
    0x00AE: "0000003c42bda5b9a5423c0000000000",
    0x00AF: "00003c00000000000000000000000000",
    0x00B0: "00000018242418000000000000000000",
    0x00B1: "000000001818ffff1818ffff00000000",
    0x00B2: "00003c0408103c000000000000000000",
    0x00B3: "00003c0418043c000000000000000000",
    0x00B4: "00000c18000000000000000000000000",
    0x00B5: "00000000006666666666667b60606000",
    0x00B6: "0000007cf4f4f4741414141414000000",
    0x00B7: "00000000000018180000000000000000",
    0x00B8: "00000000000000000000000010083800",
    0x00B9: "00003010101038000000000000000000",
    0x00BA: "0000001c2222221c003e000000000000",
    0x00BB: "0000000000486c36366c480000000000",
    0x00BC: "00c0404040e00638cc1c343e04000000",
    0x00BD: "00c0404040e00638de0204081e000000",
    0x00BE: "0078083008780638cc1c343e04000000",
    0x00BF: "00000000001818001818183060643800",
    0x00C0: "3018001c1c1436363e36636300000000",
    0x00C1: "0c18001c1c1436363e36636300000000",
    0x00C2: "1c36001c1c1436363e36636300000000",
    0x00C3: "3a2e001c1c1436363e36636300000000",
    0x00C4: "3636001c1c1436363e36636300000000",
    0x00C5: "081414081c1c14363e36636300000000",
    0x00C6: "0000003e7878787e78d8d8de00000000",
    0x00C7: "0000001e316060606060311e08041c00",
    0x00C8: "3018007f6060607e6060607f00000000",
    0x00C9: "0c18007f6060607e6060607f00000000",
    0x00CA: "1c36007f6060607e6060607f00000000",
    0x00CB: "3636007f6060607e6060607f00000000",
    0x00CC: "3018007e181818181818187e00000000",
    0x00CD: "0c18007e181818181818187e00000000",
    0x00CE: "1824007e181818181818187e00000000",
    0x00CF: "6666007e181818181818187e00000000",
    0x00D0: "0000007c6663fb636363667c00000000",
    0x00D1: "3a2e007373737b6b6f67676700000000",
    0x00D2: "3018001c366363636363361c00000000",
    0x00D3: "0c18001c366363636363361c00000000",
    0x00D4: "1c36001c366363636363361c00000000",
    0x00D5: "3a2e001c366363636363361c00000000",
    0x00D6: "3636001c366363636363361c00000000",
    0x00D7: "0000000000247e3c3c7e240000000000",
    0x00D8: "00003e6eceded6f6e6ecf80000000000",
    0x00D9: "30180063636363636363633e00000000",
    0x00DA: "0c180063636363636363633e00000000",
    0x00DB: "1c360063636363636363633e00000000",
    0x00DC: "36360063636363636363633e00000000",
    0x00DD: "0c1800c366663c3c1818181800000000",
    0x00DE: "00000060607e636363637e6000000000",
    0x00DF: "003c62666c6c6c6c6666666c00000000",
    0x00E0: "00003018001c26063e66663e00000000",
    0x00E1: "00000c18001c26063e66663e00000000",
    0x00E2: "00001c36001c26063e66663e00000000",
    0x00E3: "0000342c001c26063e66663e00000000",
    0x00E4: "00003636001c26063e66663e00000000",
    0x00E5: "18242418001c26063e66663e00000000",
    0x00E6: "00000000003c5a1a7ed8d87e00000000",
    0x00E7: "00000000001c32606060321c10083800",
    0x00E8: "00003018003c66667e60623c00000000",
    0x00E9: "00000c18003c66667e60623c00000000",
    0x00EA: "00001c36003c66667e60623c00000000",
    0x00EB: "00003636003c66667e60623c00000000",
    0x00EC: "00003018007818181818187e00000000",
    0x00ED: "00000c18007818181818187e00000000",
    0x00EE: "00001c36007818181818187e00000000",
    0x00EF: "00003636007818181818187e00000000",
    0x00F0: "3418380c3c66666666663c0000000000",
    0x00F1: "0000342c007c66666666666600000000",
    0x00F2: "00003018003c66666666663c00000000",
    0x00F3: "00000c18003c66666666663c00000000",
    0x00F4: "00001824003c66666666663c00000000",
    0x00F5: "0000342c003c66666666663c00000000",
    0x00F6: "00006666003c66666666663c00000000",
    0x00F7: "00000000181800ffff00181800000000",
    0x00F8: "00000000023e6e6e7e76667c40000000",
    0x00F9: "00003018006666666666663e00000000",
    0x00FA: "00000c18006666666666663e00000000",
    0x00FB: "00001824006666666666663e00000000",
    0x00FC: "00006666006666666666663e00000000",
    0x00FD: "00000c180066662c3c3c181818307000",
    0x00FE: "00606060607c66666666667c60606000",
    0x00FF: "000066660066662c3c3c181818307000",
}
