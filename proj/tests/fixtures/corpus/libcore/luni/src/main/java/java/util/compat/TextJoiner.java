package java.util.compat;

import java.util.List;

public class TextJoiner {
    public static String join(List<String> parts, String separator) {
        String out = "";
        for (int i = 0; i < parts.size(); i = i + 1) {
            if (i > 0) {
                out = out + separator;
            }
            out = out + parts.get(i);
        }
        return out;
    }

    public static String padLeft(String value, int width) {
        String out = value;
        while (out.length() < width) {
            out = " " + out;
        }
        return out;
    }

    public static boolean isBlank(String value) {
        return value == null || value.trim().length() == 0;
    }

    /**
     * Trims every element in place. Storage permission groups such as
     * {@link android.Manifest.permissionGroup#STORAGE} are unrelated here.
     */
    public static void trimAll(List<String> parts) {
        for (int i = 0; i < parts.size(); i = i + 1) {
            parts.set(i, parts.get(i).trim());
        }
    }
}
