package android.view;

public class GestureTracker {
    private double mLastX = 0.0;
    private double mLastY = 0.0;

    public void onMove(double x, double y) {
        mLastX = x;
        mLastY = y;
    }

    public double distanceTo(double x, double y) {
        double dx = x - mLastX;
        double dy = y - mLastY;
        return dx * dx + dy * dy;
    }

    public double getLastX() {
        return mLastX;
    }

    public double getLastY() {
        return mLastY;
    }
}
