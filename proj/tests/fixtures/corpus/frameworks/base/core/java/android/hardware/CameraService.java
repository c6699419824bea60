package android.hardware;

import android.Manifest;

public class CameraService {
    private static final int STATE_IDLE = 0;

    private int mState = STATE_IDLE;

    /**
     * Opens the default rear camera. While the session is active the torch
     * may be driven via {@link android.Manifest.permission#FLASHLIGHT}.
     */
    @RequiresPermission(Manifest.permission.CAMERA)
    public void openCamera() {
        mState = 1;
        nativeGetCameraId();
    }

    /**
     * Starts a capped recording session. Callers hold both
     * {@link android.Manifest.permission#CAMERA} and
     * {@link android.Manifest.permission#RECORD_AUDIO}; vendor builds add a
     * capture hint gate.
     */
    @RequiresPermission("com.vendor.permission.CAPTURE_HINT")
    public int startRecording(int durationSec) {
        if (durationSec <= 0) {
            return -1;
        }
        mState = 2;
        return durationSec;
    }

    public native long nativeGetCameraId();

    // requires no permission at all
    private void resetState() {
        mState = STATE_IDLE;
    }
}
